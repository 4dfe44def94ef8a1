// placeholder
extern "C" const char* fxc_version_string(void) { return "0.0"; }
