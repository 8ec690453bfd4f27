#pragma once

namespace g2fgt {

// Selects between the OpenMP kernels and their single-threaded reference path.
enum class Execution { serial, parallel };

// Sets the OpenMP thread count; 0 keeps the runtime default.
void set_thread_count(int threads);
int thread_count();

}  // namespace g2fgt
