#pragma once

// Truncated path signatures of time-augmented paths.
//
// Coordinate layout (stable across versions): words over the alphabet
// {0, ..., d} (letter 0 is time) are grouped by ascending length; within a
// length k they are ordered lexicographically as base-(d+1) digit strings.
// The flat index of a length-k word w is
//
//     ((d+1)^k - 1) / d + sum_j w_j * (d+1)^(k-1-j)
//
// so the empty word sits at index 0 and a depth-N signature holds
// ((d+1)^(N+1) - 1) / d coefficients.
//
// Discrete samples are read as a piecewise-linear path. Each linear piece has
// the closed-form signature prod(increments) / k!, and pieces are joined by
// the truncated tensor product (Chen's identity), which makes the result exact
// for the interpolant.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sigbandit/error.hpp"
#include "sigbandit/path.hpp"

namespace sigbandit {

using Word = std::vector<std::size_t>;

inline std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

// Offset of the first length-k word: ((d+1)^k - 1) / d.
inline std::size_t level_offset(std::size_t d, std::size_t k) { return (ipow(d + 1, k) - 1) / d; }

// m0 = ((d+1)^(N+1) - 1) / d
inline std::size_t signature_length(std::size_t d, std::size_t depth) {
  return level_offset(d, depth + 1);
}

// m = (d+1)^N
inline std::size_t pruned_length(std::size_t d, std::size_t depth) { return ipow(d + 1, depth); }

inline std::size_t word_index(std::size_t d, const Word& w) {
  std::size_t idx = 0;
  for (std::size_t letter : w) {
    if (letter > d) throw Error(ErrorCode::ShapeMismatch, "letter " + std::to_string(letter) + " > d");
    idx = idx * (d + 1) + letter;
  }
  return level_offset(d, w.size()) + idx;
}

inline std::vector<Word> canonical_words(std::size_t d, std::size_t depth) {
  std::vector<Word> words;
  words.reserve(signature_length(d, depth));
  for (std::size_t k = 0; k <= depth; ++k) {
    const std::size_t count = ipow(d + 1, k);
    for (std::size_t i = 0; i < count; ++i) {
      Word w(k);
      std::size_t rem = i;
      for (std::size_t j = k; j-- > 0;) {
        w[j] = rem % (d + 1);
        rem /= d + 1;
      }
      words.push_back(std::move(w));
    }
  }
  return words;
}

// d is the channel count of the un-augmented path; the alphabet has d + 1 letters.
struct SignatureVector {
  std::size_t d = 1;
  std::size_t depth = 0;
  std::vector<double> coeffs;

  static SignatureVector identity(std::size_t d, std::size_t depth) {
    SignatureVector s{d, depth, std::vector<double>(signature_length(d, depth), 0.0)};
    s.coeffs[0] = 1.0;
    return s;
  }

  double at(const Word& w) const { return coeffs.at(word_index(d, w)); }

  std::span<const double> level(std::size_t k) const {
    return {coeffs.data() + level_offset(d, k), ipow(d + 1, k)};
  }
};

struct PrunedSignature {
  std::size_t d = 1;
  std::size_t depth = 0;
  std::vector<double> coeffs;
};

struct FeatureVector {
  int round = 0;
  std::vector<double> coords;
};

inline SignatureVector segment_signature(std::span<const double> increment, std::size_t depth) {
  if (increment.empty()) throw Error(ErrorCode::ShapeMismatch, "empty increment");
  const std::size_t d = increment.size() - 1;
  if (d == 0) throw Error(ErrorCode::ShapeMismatch, "increment needs time plus at least one channel");
  const std::size_t alphabet = d + 1;
  SignatureVector s = SignatureVector::identity(d, depth);
  for (std::size_t k = 1; k <= depth; ++k) {
    const std::size_t prev = level_offset(d, k - 1);
    const std::size_t cur = level_offset(d, k);
    const std::size_t prev_count = ipow(alphabet, k - 1);
    const double inv_k = 1.0 / static_cast<double>(k);
    for (std::size_t i = 0; i < prev_count; ++i) {
      const double base = s.coeffs[prev + i] * inv_k;
      for (std::size_t a = 0; a < alphabet; ++a) {
        s.coeffs[cur + i * alphabet + a] = base * increment[a];
      }
    }
  }
  return s;
}

// Truncated tensor product: coefficient of w is the sum over all splits
// w = u.v of a[u] * b[v].
inline SignatureVector chen_concat(const SignatureVector& a, const SignatureVector& b) {
  if (a.d != b.d || a.depth != b.depth) {
    throw Error(ErrorCode::ShapeMismatch, "chen_concat needs matching (d, depth)");
  }
  const std::size_t d = a.d;
  const std::size_t alphabet = d + 1;
  SignatureVector out{d, a.depth, std::vector<double>(a.coeffs.size(), 0.0)};
  for (std::size_t k = 0; k <= a.depth; ++k) {
    double* dst = out.coeffs.data() + level_offset(d, k);
    for (std::size_t i = 0; i <= k; ++i) {
      const std::size_t j = k - i;
      const double* lhs = a.coeffs.data() + level_offset(d, i);
      const double* rhs = b.coeffs.data() + level_offset(d, j);
      const std::size_t lhs_count = ipow(alphabet, i);
      const std::size_t rhs_count = ipow(alphabet, j);
      for (std::size_t u = 0; u < lhs_count; ++u) {
        const double lu = lhs[u];
        if (lu == 0.0) continue;
        double* row = dst + u * rhs_count;
        for (std::size_t v = 0; v < rhs_count; ++v) row[v] += lu * rhs[v];
      }
    }
  }
  return out;
}

namespace detail {

// acc <- acc (x) exp(increment), in place, on a flat coefficient array.
// Levels are rewritten from the top down so lower levels of acc are still the
// old values when read.
template <class Real>
void extend_by_segment(std::vector<Real>& acc, std::size_t d, std::size_t depth,
                       std::span<const Real> increment, std::vector<Real>& seg_buf) {
  const std::size_t alphabet = d + 1;
  seg_buf.assign(signature_length(d, depth), Real(0));
  seg_buf[0] = Real(1);
  for (std::size_t k = 1; k <= depth; ++k) {
    const std::size_t prev = level_offset(d, k - 1);
    const std::size_t cur = level_offset(d, k);
    const std::size_t prev_count = ipow(alphabet, k - 1);
    const Real inv_k = Real(1) / static_cast<Real>(k);
    for (std::size_t i = 0; i < prev_count; ++i) {
      const Real base = seg_buf[prev + i] * inv_k;
      for (std::size_t a = 0; a < alphabet; ++a) seg_buf[cur + i * alphabet + a] = base * increment[a];
    }
  }
  for (std::size_t k = depth; k >= 1; --k) {
    Real* dst = acc.data() + level_offset(d, k);
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = k - i;
      const Real* lhs = acc.data() + level_offset(d, i);
      const Real* rhs = seg_buf.data() + level_offset(d, j);
      const std::size_t lhs_count = ipow(alphabet, i);
      const std::size_t rhs_count = ipow(alphabet, j);
      for (std::size_t u = 0; u < lhs_count; ++u) {
        const Real lu = lhs[u];
        if (lu == Real(0)) continue;
        Real* row = dst + u * rhs_count;
        for (std::size_t v = 0; v < rhs_count; ++v) row[v] += lu * rhs[v];
      }
    }
  }
}

inline void require_augmented(const DiscretePath& path) {
  if (path.channels() < 2) {
    throw Error(ErrorCode::NotAugmented, "augmented path needs time plus at least one channel");
  }
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path.value(i, 0) != path.time(i)) {
      throw Error(ErrorCode::NotAugmented,
                  "channel 0 differs from the timestamp at sample " + std::to_string(i));
    }
  }
}

}  // namespace detail

// Depth-N signature of a time-augmented path (channel 0 must equal the timestamps).
// Accumulates in long double: for a path that ends near where it started, the
// high-level coefficients are small differences of much larger running values.
inline SignatureVector signature(const DiscretePath& augmented, std::size_t depth) {
  detail::require_augmented(augmented);
  if (augmented.size() < 2) throw Error(ErrorCode::InvalidPath, "signature needs at least 2 samples");
  const std::size_t channels = augmented.channels();
  const std::size_t d = channels - 1;
  std::vector<long double> acc(signature_length(d, depth), 0.0L);
  acc[0] = 1.0L;
  std::vector<long double> increment(channels);
  std::vector<long double> seg_buf;
  for (std::size_t i = 1; i < augmented.size(); ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      increment[c] = static_cast<long double>(augmented.value(i, c)) - augmented.value(i - 1, c);
    }
    detail::extend_by_segment<long double>(acc, d, depth, increment, seg_buf);
  }
  SignatureVector out{d, depth, std::vector<double>(acc.size())};
  for (std::size_t i = 0; i < acc.size(); ++i) out.coeffs[i] = static_cast<double>(acc[i]);
  return out;
}

// All order-preserving interleavings of u and v, with multiplicity.
inline std::vector<Word> shuffle(const Word& u, const Word& v) {
  if (u.empty()) return {v};
  if (v.empty()) return {u};
  std::vector<Word> out;
  // Last letter comes either from u or from v.
  Word u_head(u.begin(), u.end() - 1);
  Word v_head(v.begin(), v.end() - 1);
  for (Word w : shuffle(u_head, v)) {
    w.push_back(u.back());
    out.push_back(std::move(w));
  }
  for (Word w : shuffle(u, v_head)) {
    w.push_back(v.back());
    out.push_back(std::move(w));
  }
  return out;
}

inline bool retained_by_pruning(const Word& w) { return w.empty() || w.back() != 0; }

// Indices (into the canonical order) of the coordinates kept by pruning.
inline std::vector<std::size_t> pruned_indices(std::size_t d, std::size_t depth) {
  std::vector<std::size_t> idx;
  idx.reserve(pruned_length(d, depth));
  idx.push_back(0);
  for (std::size_t k = 1; k <= depth; ++k) {
    const std::size_t off = level_offset(d, k);
    const std::size_t count = ipow(d + 1, k);
    for (std::size_t i = 0; i < count; ++i) {
      if (i % (d + 1) != 0) idx.push_back(off + i);
    }
  }
  return idx;
}

// Drops every word ending in the time letter, keeping the empty word as the
// single constant coordinate.
inline PrunedSignature prune(const SignatureVector& sig) {
  PrunedSignature out{sig.d, sig.depth, {}};
  const auto idx = pruned_indices(sig.d, sig.depth);
  out.coeffs.reserve(idx.size());
  for (std::size_t i : idx) out.coeffs.push_back(sig.coeffs[i]);
  return out;
}

// Window reparameterized to start at time 0 and time-augmented.
inline DiscretePath reparameterized_augmented(const DiscretePath& path) {
  const double t0 = path.start_time();
  std::vector<double> times(path.times());
  for (double& t : times) t -= t0;
  return time_augment(DiscretePath(std::move(times), path.values(), path.channels()));
}

// [X_{t-L} channels, pruned depth-N signature of the shifted, time-augmented window]
inline FeatureVector feature_vector(const Window& window, std::size_t depth) {
  if (depth < 1) throw Error(ErrorCode::BadConfig, "signature depth must be >= 1");
  const DiscretePath& p = window.path;
  const PrunedSignature pruned = prune(signature(reparameterized_augmented(p), depth));
  FeatureVector f{window.round, {}};
  f.coords.reserve(p.channels() + pruned.coeffs.size());
  auto first = p.row(0);
  f.coords.assign(first.begin(), first.end());
  f.coords.insert(f.coords.end(), pruned.coeffs.begin(), pruned.coeffs.end());
  return f;
}

// Same layout without pruning: [X_{t-L}, full depth-N signature]. Used for the
// degeneracy contrast in the Gram diagnostics.
inline std::vector<double> unpruned_feature(const Window& window, std::size_t depth) {
  const DiscretePath& p = window.path;
  const SignatureVector sig = signature(reparameterized_augmented(p), depth);
  auto first = p.row(0);
  std::vector<double> out(first.begin(), first.end());
  out.insert(out.end(), sig.coeffs.begin(), sig.coeffs.end());
  return out;
}

inline std::size_t signature_feature_dim(std::size_t d, std::size_t depth) {
  return d + pruned_length(d, depth);
}

}  // namespace sigbandit
