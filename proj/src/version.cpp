#include "fluency/version.hpp"

#include "fluency/rng.hpp"
#include "fluency/simd/kernels.hpp"

namespace fluency {

std::string version_info() {
  std::string s = "fluency ";
  s += kVersion;
  s += "\nformats: bpe v1, unigram v1, kn v1, rnn v1, scores v1, graded v1, ratings v1\n";
  s += "rng: ";
  s += Rng::kAlgorithm;
  s += "\nsimd: ";
  s += simd::active_kernels().name;
  s += "\n";
  return s;
}

}  // namespace fluency
