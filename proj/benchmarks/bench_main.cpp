#include <benchmark/benchmark.h>

// The packaged benchmark_main archive carries LTO bytecode from another compiler; link the shared library and provide main here.
BENCHMARK_MAIN();
