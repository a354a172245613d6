#pragma once

#include <random>
#include <string>

#include "adspiral/engine.hpp"
#include "adspiral/pauli.hpp"
#include "oracle.hpp"

namespace support {

inline std::string ops_of(const adspiral::PauliString& p, int n) {
  std::string ops(n, 'I');
  for (const auto& [site, axis] : p.sites()) ops[site] = "XYZ"[static_cast<int>(axis)];
  return ops;
}

/// Dense matrix of a PauliSum built through the oracle's Kronecker products.
inline oracle::Mat dense(const adspiral::PauliSum& h) {
  const int n = h.nsites();
  oracle::Mat m = oracle::Mat::Zero(1 << n, 1 << n);
  for (const auto& t : h.terms()) m += t.coefficient * oracle::string(ops_of(t.string, n));
  return m;
}

inline adspiral::PauliSum random_sum(int n, int terms, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint64_t> mask(0, (std::uint64_t{1} << n) - 1);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  adspiral::PauliSum h(n);
  for (int k = 0; k < terms; ++k) h.add(coef(rng), adspiral::PauliString::from_masks(mask(rng), mask(rng)).without_phase());
  return h;
}

inline adspiral::StateVector random_state(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  adspiral::Amplitudes a(1 << n);
  for (auto& x : a) x = {g(rng), g(rng)};
  return adspiral::StateVector(n, a / a.norm());
}

}  // namespace support
