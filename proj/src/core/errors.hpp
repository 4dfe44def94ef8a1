// ============================================================================
// core/errors.hpp - Error codes and the exception type used across the core
// ============================================================================
#pragma once
#include <stdexcept>
#include <string>

namespace fxc {

enum class errc {
    ok = 0,
    config,               // bad configuration / arguments
    io,                   // filesystem failure
    parse,                // malformed input file
    invalid_state,        // fold state violates pattern invariants
    out_of_range,         // value outside the configured band
    negative_capacitance, // frontend inconsistency: f above empty resonance
    singular,             // flat-state singularity with clamping disabled
    negative_radicand,    // curve constants make the radicand negative
    short_circuit,        // two channel strips intersect in pattern coords
    empty_recording,
    too_short,
    misaligned,
    insufficient_sessions,
    channel_count_mismatch,
    no_overlap,
    shape_mismatch,
    diverged,
    version_mismatch,
    corrupt_file,
    infeasible,
    range_violation,
    degenerate_input,
};

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    errc code() const { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) {
    throw Error(code, msg);
}

} // namespace fxc
