#include "mbgp/parallel.hpp"

#include "mbgp/simd.hpp"

namespace mbgp {

double deterministic_sum(std::span<const double> values) {
  if (values.size() <= kReductionChunk) return simd::sum(values);
  std::vector<double> partial;
  partial.reserve(values.size() / kReductionChunk + 1);
  for (std::size_t b = 0; b < values.size(); b += kReductionChunk)
    partial.push_back(simd::sum(values.subspan(b, std::min(kReductionChunk, values.size() - b))));
  while (partial.size() > 1) {
    std::size_t out = 0;
    for (std::size_t i = 0; i + 1 < partial.size(); i += 2) partial[out++] = partial[i] + partial[i + 1];
    if (partial.size() % 2 == 1) partial[out++] = partial.back();
    partial.resize(out);
  }
  return partial.front();
}

} // namespace mbgp
