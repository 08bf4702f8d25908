#pragma once
// Core value types shared by the designers and the codec.
//
// An Spv ("symbol probability vector") describes the per-symbol distribution
// of one content item over an N-symbol alphabet. A Codebook is a vector of
// implied symbol probabilities q; the implied codeword length of symbol n is
// -log2 q_n, and decodability requires the Kraft sum of q to stay at or
// below one. All types are immutable values after construction.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace prefcode {

inline constexpr double kProbTol = 1e-9;
inline constexpr double kInfBits = std::numeric_limits<double>::infinity();

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct AllInfinite : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyCluster : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RejectionStall : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoBoundary : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct KraftViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct Unencodable : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BadMagic : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TruncatedStream : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidCodeword : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ZeroProbabilitySymbol : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Probability vector over the N-symbol alphabet. Entries must be
/// nonnegative and sum to one within 1e-9; the stored vector is renormalized
/// on ingest so downstream arithmetic sees an exact unit sum.
class Spv {
 public:
  Spv() = default;

  explicit Spv(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.size() < 2) throw std::invalid_argument("Spv needs at least 2 symbols");
    double sum = 0.0;
    for (auto& v : probs_) {
      if (v < 0.0) {
        if (v < -1e-12) throw std::invalid_argument("Spv entry is negative");
        v = 0.0;
      }
      if (v > 1.0 + kProbTol) throw std::invalid_argument("Spv entry exceeds 1");
      sum += v;
    }
    if (std::abs(sum - 1.0) > kProbTol)
      throw std::invalid_argument("Spv entries must sum to 1 (got " + std::to_string(sum) + ")");
    for (auto& v : probs_) v /= sum;
  }

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t n) const { return probs_[n]; }
  const std::vector<double>& probs() const { return probs_; }

  friend bool operator==(const Spv& a, const Spv& b) { return a.probs_ == b.probs_; }

 private:
  std::vector<double> probs_;
};

/// Implied-probability vector of one codebook. Kraft sum must not exceed one
/// (within 1e-9) and at least one entry must be positive. Entries are not
/// renormalized: a sum strictly below one is a legal, merely wasteful code.
class Codebook {
 public:
  Codebook() = default;

  explicit Codebook(std::vector<double> q) : q_(std::move(q)) {
    if (q_.size() < 2) throw std::invalid_argument("Codebook needs at least 2 symbols");
    double sum = 0.0;
    bool any_positive = false;
    for (auto& v : q_) {
      if (v < 0.0) {
        if (v < -1e-12) throw std::invalid_argument("Codebook entry is negative");
        v = 0.0;
      }
      if (v > 0.0) any_positive = true;
      sum += v;
    }
    if (sum > 1.0 + kProbTol)
      throw KraftViolation("Kraft sum exceeds 1: " + std::to_string(sum));
    if (!any_positive) throw std::invalid_argument("Codebook must have a positive entry");
  }

  std::size_t size() const { return q_.size(); }
  double operator[](std::size_t n) const { return q_[n]; }
  const std::vector<double>& q() const { return q_; }

  friend bool operator==(const Codebook& a, const Codebook& b) { return a.q_ == b.q_; }

 private:
  std::vector<double> q_;
};

/// A set of K codebooks over a common alphabet.
class CodebookSet {
 public:
  explicit CodebookSet(std::vector<Codebook> codebooks) : codebooks_(std::move(codebooks)) {
    if (codebooks_.empty()) throw std::invalid_argument("CodebookSet must be nonempty");
    const std::size_t n = codebooks_.front().size();
    for (const auto& cb : codebooks_)
      if (cb.size() != n) throw DimensionMismatch("CodebookSet mixes alphabet sizes");
  }

  std::size_t size() const { return codebooks_.size(); }
  std::size_t alphabet_size() const { return codebooks_.front().size(); }
  const Codebook& operator[](std::size_t k) const { return codebooks_[k]; }
  const std::vector<Codebook>& codebooks() const { return codebooks_; }

 private:
  std::vector<Codebook> codebooks_;
};

/// Finite-support preference: J SPVs with request probabilities f_j.
class DiscretePreference {
 public:
  /// Normalized ingest: request probabilities must sum to 1 within 1e-9 and
  /// are renormalized exactly, mirroring Spv ingest.
  DiscretePreference(std::vector<Spv> spvs, std::vector<double> probs)
      : DiscretePreference(std::move(spvs), std::move(probs), true) {}

  /// Weighted variant: accepts any nonnegative weights with positive total.
  /// Designers treat f as weights, so uniform rescaling does not change the
  /// produced codebooks or assignments.
  static DiscretePreference with_weights(std::vector<Spv> spvs, std::vector<double> weights) {
    return DiscretePreference(std::move(spvs), std::move(weights), false);
  }

  std::size_t item_count() const { return spvs_.size(); }
  std::size_t alphabet_size() const { return spvs_.front().size(); }
  const Spv& spv(std::size_t j) const { return spvs_[j]; }
  double prob(std::size_t j) const { return probs_[j]; }
  const std::vector<Spv>& spvs() const { return spvs_; }
  const std::vector<double>& probs() const { return probs_; }

 private:
  DiscretePreference(std::vector<Spv> spvs, std::vector<double> probs, bool normalized)
      : spvs_(std::move(spvs)), probs_(std::move(probs)) {
    if (spvs_.empty()) throw std::invalid_argument("preference needs at least one SPV");
    if (probs_.size() != spvs_.size())
      throw DimensionMismatch("preference SPV/probability count mismatch");
    const std::size_t n = spvs_.front().size();
    for (const auto& p : spvs_)
      if (p.size() != n) throw DimensionMismatch("preference mixes alphabet sizes");
    double sum = 0.0;
    for (double f : probs_) {
      if (f < 0.0) throw std::invalid_argument("request probability is negative");
      sum += f;
    }
    if (!(sum > 0.0)) throw std::invalid_argument("total request probability must be positive");
    if (normalized) {
      if (std::abs(sum - 1.0) > kProbTol)
        throw std::invalid_argument("request probabilities must sum to 1");
      for (auto& f : probs_) f /= sum;
    }
  }

  std::vector<Spv> spvs_;
  std::vector<double> probs_;
};

/// owner[j] = index of the codebook item j is encoded with.
struct PartitionAssignment {
  std::vector<std::size_t> owner;
};

/// One content item: L symbol indices into the alphabet.
struct ItemSpec {
  std::vector<std::size_t> symbols;

  std::size_t length() const { return symbols.size(); }
};

}  // namespace prefcode
