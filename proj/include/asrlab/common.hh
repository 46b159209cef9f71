// asrlab/common.hh

// Copyright 2026  asrlab authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef ASRLAB_COMMON_HH_
#define ASRLAB_COMMON_HH_

#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace asrlab {

// Error taxonomy.  Configuration and input errors map to CLI exit code 3,
// numeric failures to 4, everything else is a bug (contract violation).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string &msg) : Error("config: " + msg) {}
};
class InputError : public Error {
 public:
  explicit InputError(const std::string &msg) : Error("input: " + msg) {}
};
class ContractError : public Error {
 public:
  explicit ContractError(const std::string &msg) : Error("contract: " + msg) {}
};
class ParamError : public Error {
 public:
  explicit ParamError(const std::string &msg) : Error("param: " + msg) {}
};
class NumericError : public Error {
 public:
  explicit NumericError(const std::string &msg) : Error("numeric: " + msg) {}
};

inline void Require(bool cond, const std::string &msg) {
  if (!cond) throw ContractError(msg);
}

// 64-bit FNV-1a.  Used for config digests and for deriving per-object seeds;
// stability across runs matters, cryptographic strength does not.
uint64_t Hash64(const void *data, size_t n, uint64_t seed = 0xcbf29ce484222325ull);
uint64_t Hash64(const std::string &s, uint64_t seed = 0xcbf29ce484222325ull);
uint64_t HashMix(uint64_t a, uint64_t b);
std::string HashHex(uint64_t h);

// Derives an independent stream seed from a base seed and a tag such as
// "aug/utt000017/noise/1".  All randomness in the pipeline flows through this.
uint64_t DeriveSeed(uint64_t base, const std::string &tag);

// Thin wrapper over mt19937_64 with the handful of draws we need.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}
  double Uniform(double lo, double hi);
  double LogUniform(double lo, double hi);
  double Gaussian(double mean = 0.0, double stddev = 1.0);
  int UniformInt(int lo, int hi);  // inclusive bounds
  bool Coin(double p_true = 0.5);
  uint64_t Raw() { return gen_(); }
  std::mt19937_64 &gen() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

// Runs fn(i) for i in [0, n) on up to `jobs` threads.  Tasks must be
// independent; results should be written to pre-sized slots so that the
// outcome does not depend on scheduling.
void ParallelFor(int n, int jobs, const std::function<void(int)> &fn);

std::vector<std::string> SplitString(const std::string &s, char sep,
                                     bool keep_empty = false);
std::string JoinStrings(const std::vector<std::string> &parts,
                        const std::string &sep);
std::string TrimString(const std::string &s);

std::string ReadTextFile(const std::string &path);
void WriteTextFile(const std::string &path, const std::string &content);

// Fixed-point decimal formatting for reports (printf "%.*f").
std::string FormatFixed(double value, int decimals);

template <typename... Args>
std::string StrCat(Args &&...args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}

void LogMessage(const std::string &msg);

}  // namespace asrlab

#endif  // ASRLAB_COMMON_HH_
