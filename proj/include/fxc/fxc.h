/* ===========================================================================
 * fxc.h - C API for the FxC origami capacitive-sensing toolkit
 * ===========================================================================
 *
 * Everything the shared library exports. The model: opaque handles created
 * and freed by the library, plain structs for configuration, and integer
 * status codes. Any call that can fail returns fxc_status; on failure,
 * fxc_last_error() describes the problem for the calling thread.
 *
 * Conventions:
 *   - lengths in meters unless a name says otherwise; primitives in cm
 *   - frequencies in Hz, capacitances in farads, timestamps in unix ms
 *   - every *_create / *_load / *_generate output must be freed with the
 *     matching *_free; strings returned as char* go to fxc_string_free
 */
#ifndef FXC_H
#define FXC_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* --- status ------------------------------------------------------------- */

typedef enum fxc_status {
    FXC_OK = 0,
    FXC_ERR_CONFIG = 1,
    FXC_ERR_IO = 2,
    FXC_ERR_PARSE = 3,
    FXC_ERR_INVALID_STATE = 4,
    FXC_ERR_OUT_OF_RANGE = 5,
    FXC_ERR_NEGATIVE_CAPACITANCE = 6,
    FXC_ERR_SINGULAR = 7,
    FXC_ERR_NEGATIVE_RADICAND = 8,
    FXC_ERR_SHORT_CIRCUIT = 9,
    FXC_ERR_EMPTY_RECORDING = 10,
    FXC_ERR_TOO_SHORT = 11,
    FXC_ERR_MISALIGNED = 12,
    FXC_ERR_INSUFFICIENT_SESSIONS = 13,
    FXC_ERR_CHANNEL_COUNT = 14,
    FXC_ERR_NO_OVERLAP = 15,
    FXC_ERR_SHAPE_MISMATCH = 16,
    FXC_ERR_DIVERGED = 17,
    FXC_ERR_VERSION_MISMATCH = 18,
    FXC_ERR_CORRUPT_FILE = 19,
    FXC_ERR_INFEASIBLE = 20,
    FXC_ERR_RANGE_VIOLATION = 21,
    FXC_ERR_DEGENERATE_INPUT = 22,
    FXC_ERR_UNKNOWN = 99
} fxc_status;

const char* fxc_last_error(void);
const char* fxc_version_string(void);
void fxc_string_free(char* s);

/* --- opaque handles ------------------------------------------------------ */

typedef struct fxc_pattern fxc_pattern;
typedef struct fxc_state fxc_state;
typedef struct fxc_mesh fxc_mesh;
typedef struct fxc_trajectory fxc_trajectory;
typedef struct fxc_recording fxc_recording;   /* timestamped frequency frames */
typedef struct fxc_primitives fxc_primitives; /* timestamped primitive triples */
typedef struct fxc_dataset fxc_dataset;       /* windowed training tensors */
typedef struct fxc_model fxc_model;

/* --- configuration structs ----------------------------------------------- */

typedef struct fxc_frontend_config {
    double inductance_L;  /* H */
    double fixed_cap_C0;  /* F */
    double freq_min;      /* Hz */
    double freq_max;
} fxc_frontend_config;
fxc_frontend_config fxc_frontend_default(void);

typedef struct fxc_channel_model {
    double epsilon;       /* F/m */
    double parasitic_cap; /* F per channel */
    double clamp_frac;    /* flat clamp, fraction of segment length */
    double height_floor;  /* m, effective stack thickness */
    double sample_step;   /* m along the strip; 0 = segment length */
} fxc_channel_model;
fxc_channel_model fxc_channel_model_default(void);

typedef struct fxc_curve_constants {
    double k1, k2, k3;
    double r1, r2, r3;
} fxc_curve_constants;
fxc_status fxc_curve_constants_from_geometry(double segment_len_a, double width, double epsilon,
                                             double r1, double r2, double r3,
                                             fxc_curve_constants* out);

typedef struct fxc_material {
    double noise_sigma;      /* Hz */
    double drift_rate;       /* Hz/s random-walk scale */
    double hysteresis_gamma; /* first-order state lag */
} fxc_material;
fxc_status fxc_material_preset(const char* name, fxc_material* out); /* cloth | paper */

typedef struct fxc_motion_element {
    int kind;          /* 0 open, 1 close, 2 asym-left, 3 asym-right, 4 skew, 5 hold */
    double duration_s;
    double amplitude;  /* fraction of the deployable range */
} fxc_motion_element;

typedef struct fxc_train_config {
    size_t batch_size;        /* 4096 */
    double lr0;               /* 0.01 */
    double lr_decay;          /* 0.5 */
    int decay_every_epochs;   /* 20 */
    int early_stop_patience;  /* 100 */
    int max_epochs;           /* 1000 */
    uint64_t seed;
} fxc_train_config;
fxc_train_config fxc_train_config_default(void);

/* --- scalar physics ------------------------------------------------------- */

fxc_status fxc_freq_to_cap(const fxc_frontend_config* fe, double freq_hz, double* out_farads);
fxc_status fxc_cap_to_freq(const fxc_frontend_config* fe, double cap_farads, double* out_hz);
fxc_status fxc_segment_cap(double a, double w, double dh, double epsilon, double clamp_frac,
                           double* out_farads);
fxc_status fxc_cap_to_height(double dc, double a, double w, double epsilon, double* out_m);
fxc_status fxc_segment_volume(double a, double w, double dh, double* out_m3);
fxc_status fxc_volume_from_capacitance(const fxc_curve_constants* k, double dc, double* out_m3);
/* dh,dC,dV,f sweep of the single-section curve as CSV */
fxc_status fxc_write_curve_sweep_csv(double a, double w, const fxc_curve_constants* k,
                                     const fxc_frontend_config* fe, int points, const char* path);

/* --- patterns and states --------------------------------------------------- */

/* names: accordion-r accordion-p accordion-d chevron-r chevron-p vfold sunray */
fxc_status fxc_pattern_create(const char* kind, int num_channels, fxc_pattern** out);
fxc_status fxc_pattern_from_config_file(const char* path, fxc_pattern** out);
void fxc_pattern_free(fxc_pattern* p);
int fxc_pattern_channel_count(const fxc_pattern* p);
int fxc_pattern_bay_count(const fxc_pattern* p);
double fxc_pattern_segment_len(const fxc_pattern* p);
double fxc_pattern_fixed_edge_len(const fxc_pattern* p);
double fxc_pattern_deploy_min(const fxc_pattern* p);
double fxc_pattern_deploy_max(const fxc_pattern* p);
/* out[6] = {p1_min,p1_max, p2_min,p2_max, p3_min,p3_max} in cm */
void fxc_pattern_primitive_ranges(const fxc_pattern* p, double out_cm[6]);
/* three label strings, e.g. "Top"; pointers stay valid while p lives */
void fxc_pattern_primitive_labels(const fxc_pattern* p, const char* out[3]);

fxc_status fxc_state_create(const fxc_pattern* p, const double* top, const double* bottom,
                            size_t bays, double arm_angle0, double arm_angle1, fxc_state** out);
fxc_status fxc_state_from_extents(const fxc_pattern* p, double extent_top_m,
                                  double extent_bottom_m, fxc_state** out);
fxc_status fxc_state_flat(const fxc_pattern* p, fxc_state** out);
void fxc_state_free(fxc_state* s);
/* clamps fold heights into [0, 0.999a]; returns 1 when something moved */
int fxc_state_clamp(const fxc_pattern* p, fxc_state* s);
fxc_status fxc_state_profiles(const fxc_pattern* p, const fxc_state* s, double* top_out,
                              double* bottom_out);

fxc_status fxc_extract_primitives(const fxc_pattern* p, const fxc_state* s, double out_cm[3]);
fxc_status fxc_local_height(const fxc_pattern* p, const fxc_state* s, double u, double v,
                            double* out_m);
fxc_status fxc_analytic_volume(const fxc_pattern* p, const fxc_state* s, double* out_m3);
fxc_status fxc_channel_capacitance(const fxc_pattern* p, const fxc_state* s, int channel,
                                   const fxc_channel_model* model, double* out_farads);

fxc_status fxc_realize_surface(const fxc_pattern* p, const fxc_state* s, fxc_mesh** out);
void fxc_mesh_free(fxc_mesh* m);
size_t fxc_mesh_vertex_count(const fxc_mesh* m);
size_t fxc_mesh_face_count(const fxc_mesh* m);
void fxc_mesh_copy_vertices(const fxc_mesh* m, double* xyz_out);       /* 3 per vertex */
void fxc_mesh_copy_faces(const fxc_mesh* m, int32_t* idx_out);         /* 3 per face */
fxc_status fxc_mesh_export_obj(const fxc_mesh* m, const char* path);

/* --- motion and synthesis -------------------------------------------------- */

/* arbitrary element mix covering total_s seconds; returns the number written
 * (call with elems = NULL to query the required capacity) */
size_t fxc_random_elements(uint64_t seed, double total_s, fxc_motion_element* elems, size_t cap);
fxc_status fxc_motion_elements_from_config(const char* path, fxc_motion_element* elems,
                                           size_t cap, size_t* out_count);

fxc_status fxc_trajectory_generate(const fxc_pattern* p, const fxc_motion_element* elems,
                                   size_t count, uint64_t seed, fxc_trajectory** out);
void fxc_trajectory_free(fxc_trajectory* t);
size_t fxc_trajectory_frames(const fxc_trajectory* t);
fxc_status fxc_trajectory_state_at(const fxc_trajectory* t, size_t index, fxc_state** out);

/* trajectory -> channel capacitances -> frontend -> material corruption */
fxc_status fxc_synthesize_session(const fxc_pattern* p, const fxc_trajectory* t,
                                  const fxc_material* material, const fxc_frontend_config* fe,
                                  const fxc_channel_model* model, uint64_t seed,
                                  int64_t base_ts_ms, const char* session_id,
                                  fxc_recording** out_rec, fxc_primitives** out_truth);

/* --- recordings and files --------------------------------------------------- */

fxc_status fxc_recording_from_csv(const char* path, fxc_recording** out);
fxc_status fxc_recording_write_csv(const fxc_recording* r, const char* path);
void fxc_recording_free(fxc_recording* r);
size_t fxc_recording_frames(const fxc_recording* r);
int fxc_recording_channels(const fxc_recording* r);
void fxc_recording_copy(const fxc_recording* r, int64_t* ts_out, double* values_out);

fxc_status fxc_primitives_from_csv(const char* path, fxc_primitives** out);
fxc_status fxc_primitives_write_csv(const fxc_primitives* p, const char* path);
void fxc_primitives_free(fxc_primitives* p);
size_t fxc_primitives_count(const fxc_primitives* p);
void fxc_primitives_copy(const fxc_primitives* p, int64_t* ts_out, double* values_out);

/* markers: csv with header ts_ms,marker_id,x_px,y_px; endpoints[6] lists the
 * marker-id pairs measuring p1, p2, p3 */
fxc_status fxc_markers_to_primitives(const char* marker_csv, const int endpoints[6],
                                     double scale_cm_per_px, fxc_primitives** out,
                                     size_t* out_dropped);

/* derivative cross-correlation alignment; manual_offset_ms may be NULL */
fxc_status fxc_align(const fxc_recording* frames, const fxc_primitives* targets,
                     double search_window_s, const double* manual_offset_ms,
                     fxc_recording** out_frames, fxc_primitives** out_targets,
                     double* out_offset_ms, double* out_peak_corr, int* out_weak);

/* --- datasets ---------------------------------------------------------------- */

/* per-session normalization, 30-frame windows, last session tests, the tail
 * val_frac of the training windows validates */
fxc_status fxc_dataset_build(const fxc_recording* const* recs, const fxc_primitives* const* prims,
                             size_t sessions, double val_frac, fxc_dataset** out_train,
                             fxc_dataset** out_val, fxc_dataset** out_test);
void fxc_dataset_free(fxc_dataset* d);
size_t fxc_dataset_count(const fxc_dataset* d);
int fxc_dataset_channels(const fxc_dataset* d);
void fxc_dataset_copy_targets(const fxc_dataset* d, double* cm_out); /* 3 per window */
fxc_status fxc_dataset_save(const fxc_dataset* d, const char* dir);
fxc_status fxc_dataset_load(const char* dir, fxc_dataset** out);

/* --- regression --------------------------------------------------------------- */

fxc_status fxc_model_create(int channels, fxc_model** out);
void fxc_model_free(fxc_model* m);
fxc_status fxc_model_init(fxc_model* m, uint64_t seed);
size_t fxc_model_param_count(const fxc_model* m);
/* target normalization ranges, cm; layout as fxc_pattern_primitive_ranges */
fxc_status fxc_model_set_target_ranges(fxc_model* m, const double ranges_cm[6]);
fxc_status fxc_model_save(const fxc_model* m, const char* path);
fxc_status fxc_model_load(const char* path, fxc_model** out);
uint64_t fxc_model_checksum(const fxc_model* m);

/* predictions in cm, 3 per window */
fxc_status fxc_model_predict(const fxc_model* m, const fxc_dataset* d, double* cm_out);
/* JSON TrainReport through out_report_json (optional) */
fxc_status fxc_train(fxc_model* m, const fxc_dataset* train, const fxc_dataset* val,
                     const fxc_train_config* cfg, char** out_report_json);
/* max relative error of analytic vs central-difference gradients */
fxc_status fxc_backward_check(const fxc_model* m, const fxc_dataset* probe, size_t batch,
                              double eps, int num_params, uint64_t seed, double* out_max_rel_err);

/* --- evaluation and reconstruction --------------------------------------------- */

/* truth/pred are [n,3] cm; returns the EvalReport as JSON */
fxc_status fxc_evaluate(const double* truth, const double* pred, size_t n, const char* label1,
                        const char* label2, const char* label3, char** out_json);
fxc_status fxc_write_scatter_csv(const char* path, const double* truth, const double* pred,
                                 size_t n, int dim, const char* label);
fxc_status fxc_write_scatter_svg(const char* path, const double* truth, const double* pred,
                                 size_t n, int dim, const char* title);

/* least-squares inversion back to a fold state; previous may be NULL */
fxc_status fxc_reconstruct(const fxc_pattern* p, const double primitives_cm[3],
                           const fxc_state* previous, fxc_state** out_state,
                           double* out_residual_cm, int* out_clamped);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FXC_H */
