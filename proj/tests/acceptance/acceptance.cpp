// Acceptance gate: one PASS/FAIL line per criterion, with the measured values
// underneath. Usage: waistlab_acceptance [id ...]; no ids runs everything.

#include "waistlab/verification.hpp"

#include <iostream>

int main(int argc, char** argv) {
  using namespace waistlab::verify;
  std::vector<std::string> only(argv + 1, argv + argc);
  bool ok = true;
  std::size_t ran = 0;
  for (const auto& c : all_checks(true)) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    ++ran;
    CheckResult r;
    try {
      r = c.run(Scale::full);
    } catch (const std::exception& e) {
      r.id = c.id;
      r.title = "exception";
      r.fail(e.what());
    }
    ok = ok && r.passed;
    std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << "criterion " << r.id << ": " << r.title << " ("
              << detail::fmt(r.seconds) << " s)\n";
    for (const auto& d : r.details) std::cout << "         " << d << "\n";
    std::cout.flush();
  }
  if (ran == 0) {
    std::cerr << "no criterion matched\n";
    return 2;
  }
  return ok ? 0 : 1;
}
