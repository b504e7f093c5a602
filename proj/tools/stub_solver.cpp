// Deterministic stand-in solver for harness tests and CI: burns a requested
// amount of CPU (or wall) time derived from its arguments, then exits with a
// DIMACS-convention code.
#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <string>
#include <thread>

static double cpu_now() { return double(std::clock()) / CLOCKS_PER_SEC; }

int main(int argc, char **argv) {
  double base = 0.0, scale = 0.0, vardecay = 0.9, clausedecay = 0.9;
  double sleep_s = 0.0;
  int exit_code = 20;

  for (int i = 1; i < argc; ++i) {
    const char *a = argv[i];
    auto starts = [a](const char *p) {
      return std::strncmp(a, p, std::strlen(p)) == 0;
    };
    if (starts("-cpu-base="))
      base = std::atof(a + 10);
    else if (starts("-cpu-scale="))
      scale = std::atof(a + 11);
    else if (starts("-vardecay="))
      vardecay = std::atof(a + 10);
    else if (starts("-clausedecay="))
      clausedecay = std::atof(a + 13);
    else if (starts("-sleep="))
      sleep_s = std::atof(a + 7);
    else if (starts("-exit="))
      exit_code = std::atoi(a + 6);
    // anything else (the instance path) is ignored
  }

  if (sleep_s > 0.0)
    std::this_thread::sleep_for(std::chrono::duration<double>(sleep_s));

  double target = base + scale * ((vardecay - 0.9) * (vardecay - 0.9) +
                                  (clausedecay - 0.9) * (clausedecay - 0.9));
  volatile double sink = 0.0;
  while (cpu_now() < target)
    for (int i = 0; i < 1000; ++i)
      sink = sink + i * 1e-9;

  return exit_code;
}
