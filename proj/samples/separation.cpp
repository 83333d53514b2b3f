// Shows that the d-distributive law separates L(Q^d) from L(Q^(d+1)).
#include <iostream>

#include "molwb/molwb.hpp"

int main() {
  using namespace molwb;
  for (std::size_t d = 1; d <= 3; ++d) {
    Identity id = delta_distributive(d);
    auto low = refute_random(id, RationalField{}, d, {500, 1, 1});
    auto high = refute_bounded(id, RationalField{}, d + 1, {64, 1, 1});
    std::cout << "d = " << d << ": " << print_identity(id) << "\n";
    std::cout << "  L(Q^" << d << "): "
              << (low.status == RefutationStatus::Refuted ? "refuted" : "valid up to 500 trials") << "\n";
    if (high.witness) {
      std::cout << "  L(Q^" << high.witness->d << "): refuted by\n";
      for (const auto& [name, u] : high.witness->assignment) std::cout << "    " << name << " = " << u.to_string() << "\n";
    } else {
      std::cout << "  no witness up to d = " << d + 1 << "\n";
    }
  }
}
