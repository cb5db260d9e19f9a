// Prints D_k(C_2^r) for r = 2..5 with the tail constant D_0 and k_D.

#include "zsk/session.hpp"

#include <cstdlib>
#include <iomanip>
#include <iostream>

int main(int argc, char** argv) {
  zsk::Int kmax = argc > 1 ? std::atoll(argv[1]) : 8;
  zsk::Session session;
  for (std::size_t r = 2; r <= 5; ++r) {
    auto rep = session.stabilization(zsk::elementary(2, r), kmax);
    std::cout << rep.group.pretty() << "\n   k  D_k  D_k-2k\n";
    for (const auto& row : rep.rows) {
      std::cout << std::setw(4) << row.k << std::setw(5) << row.cert.lower.str();
      if (row.cert.exact())
        std::cout << std::setw(8) << row.cert.lower.to_int64() - 2 * row.k;
      else
        std::cout << "  (upper " << row.cert.upper.str() << ")";
      std::cout << "\n";
    }
    std::cout << "  D_0 = " << (rep.d0 ? std::to_string(*rep.d0) : "?")
              << ", k_D = " << (rep.kd ? std::to_string(*rep.kd) : "?")
              << (rep.certified ? " (certified, rule " + rep.rule + ")" : " (not certified)") << "\n\n";
  }
}
