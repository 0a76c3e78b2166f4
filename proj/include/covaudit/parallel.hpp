#pragma once
// Thread-count control.  COVAUDIT_THREADS caps the OpenMP team size; every
// parallel kernel in the library merges per-thread work in a fixed order, so
// the cap affects wall time only, never results.

namespace covaudit {

// Parsed COVAUDIT_THREADS (0 when unset or unparsable).
int env_thread_cap();

// Applies the env cap to the OpenMP runtime; call once at process start.
void apply_thread_cap();

// Effective maximum team size (1 when built without OpenMP).
int max_threads();

}  // namespace covaudit
