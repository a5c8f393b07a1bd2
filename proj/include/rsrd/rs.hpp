#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "rsrd/gf.hpp"

namespace rsrd {

/// Hard-decision input to the errors-and-erasures decoder. Symbols at erased
/// positions are ignored.
struct HardDecisionWord {
  std::vector<Symbol> symbols;
  std::vector<std::uint8_t> erased;  // 0/1 mask, same length as symbols
};

/// Narrow-sense (n, k) Reed-Solomon code over GF(2^q) with n = 2^q - 1.
/// Systematic encoding: message occupies the last k positions; the codeword
/// polynomial c(x) = sum c_i x^i has roots alpha^1 .. alpha^{n-k}.
class RsCode {
public:
  RsCode(Field field, int n, int k) : field_(std::move(field)), n_(n), k_(k) {
    if (n != static_cast<int>(field_.order()))
      throw std::invalid_argument("RsCode: n must equal 2^q - 1");
    if (k < 1 || k >= n)
      throw std::invalid_argument("RsCode: need 1 <= k < n");
    // g(x) = prod_{i=1}^{n-k} (x - alpha^i), stored low degree first.
    gen_.assign(1, 1);
    for (int i = 1; i <= n - k; ++i) {
      const Symbol root = field_.alpha_pow(i);
      std::vector<Symbol> next(gen_.size() + 1, 0);
      for (size_t j = 0; j < gen_.size(); ++j) {
        next[j + 1] ^= gen_[j];
        next[j] ^= field_.mul(gen_[j], root);
      }
      gen_ = std::move(next);
    }
  }

  const Field& field() const { return field_; }
  int n() const { return n_; }
  int k() const { return k_; }
  int d_min() const { return n_ - k_ + 1; }
  const std::vector<Symbol>& generator_poly() const { return gen_; }

  std::vector<Symbol> encode(std::span<const Symbol> message) const {
    if (static_cast<int>(message.size()) != k_)
      throw std::invalid_argument("RsCode::encode: message length must be k");
    const int t2 = n_ - k_;
    // Remainder of m(x) * x^{n-k} modulo g(x), synthetic division.
    std::vector<Symbol> rem(t2, 0);
    for (int i = k_ - 1; i >= 0; --i) {
      const Symbol feedback = message[i] ^ rem[t2 - 1];
      for (int j = t2 - 1; j > 0; --j)
        rem[j] = rem[j - 1] ^ field_.mul(feedback, gen_[j]);
      rem[0] = field_.mul(feedback, gen_[0]);
    }
    std::vector<Symbol> cw(n_);
    std::copy(rem.begin(), rem.end(), cw.begin());
    std::copy(message.begin(), message.end(), cw.begin() + t2);
    return cw;
  }

  bool is_codeword(std::span<const Symbol> word) const {
    if (static_cast<int>(word.size()) != n_) return false;
    for (int j = 1; j <= n_ - k_; ++j)
      if (eval_at_alpha(word, j) != 0) return false;
    return true;
  }

  /// Bounded-distance errors-and-erasures decoding (Berlekamp-Massey with
  /// erasure-initialized locator, Chien search, Forney). Returns the unique
  /// codeword c with 2*|{unerased i : r_i != c_i}| + e < d_min, or nullopt.
  std::optional<std::vector<Symbol>> decode_ee(const HardDecisionWord& word) const {
    if (static_cast<int>(word.symbols.size()) != n_ ||
        word.erased.size() != word.symbols.size())
      throw std::invalid_argument("RsCode::decode_ee: bad word length");
    const int t2 = n_ - k_;

    std::vector<int> eras_pos;
    for (int i = 0; i < n_; ++i)
      if (word.erased[i]) eras_pos.push_back(i);
    const int e = static_cast<int>(eras_pos.size());
    if (e > t2) return std::nullopt;

    std::vector<Symbol> r = word.symbols;
    for (int i : eras_pos) r[i] = 0;

    // Syndromes S[j] = r(alpha^{j+1}).
    std::vector<Symbol> synd(t2);
    bool all_zero = true;
    for (int j = 0; j < t2; ++j) {
      synd[j] = eval_at_alpha(r, j + 1);
      all_zero = all_zero && synd[j] == 0;
    }
    if (all_zero && e == 0) return r;

    // Erasure locator Gamma(x) = prod (1 - alpha^{pos} x).
    std::vector<Symbol> lambda(t2 + 1, 0);
    lambda[0] = 1;
    for (int idx = 0; idx < e; ++idx) {
      const Symbol x = field_.alpha_pow(eras_pos[idx]);
      for (int j = idx + 1; j > 0; --j)
        lambda[j] ^= field_.mul(lambda[j - 1], x);
    }

    // Berlekamp-Massey starting from the erasure locator.
    std::vector<Symbol> b = lambda;
    int el = e;
    for (int iter = e + 1; iter <= t2; ++iter) {
      Symbol discr = 0;
      for (int i = 0; i < iter; ++i)
        if (lambda[i] != 0 && synd[iter - i - 1] != 0)
          discr ^= field_.mul(lambda[i], synd[iter - i - 1]);
      if (discr == 0) {
        shift_up(b);
      } else {
        std::vector<Symbol> t(t2 + 1, 0);
        t[0] = lambda[0];
        for (int i = 0; i < t2; ++i)
          t[i + 1] = lambda[i + 1] ^ field_.mul(discr, b[i]);
        if (2 * el <= iter + e - 1) {
          el = iter + e - el;
          const Symbol dinv = field_.inv(discr);
          for (int i = 0; i <= t2; ++i) b[i] = field_.mul(lambda[i], dinv);
        } else {
          shift_up(b);
        }
        lambda = std::move(t);
      }
    }

    int deg_lambda = 0;
    for (int i = t2; i >= 0; --i)
      if (lambda[i] != 0) { deg_lambda = i; break; }
    if (lambda[0] == 0) return std::nullopt;

    // Chien search over all codeword positions.
    std::vector<int> roots;
    for (int pos = 0; pos < n_; ++pos) {
      Symbol acc = 0;
      const Symbol xinv = field_.alpha_pow(-pos);
      Symbol xp = 1;
      for (int i = 0; i <= deg_lambda; ++i) {
        acc ^= field_.mul(lambda[i], xp);
        xp = field_.mul(xp, xinv);
      }
      if (acc == 0) roots.push_back(pos);
    }
    if (static_cast<int>(roots.size()) != deg_lambda) return std::nullopt;

    // Omega(x) = S(x) * Lambda(x) mod x^{t2}.
    std::vector<Symbol> omega(t2, 0);
    for (int i = 0; i < t2; ++i) {
      Symbol acc = 0;
      for (int j = 0; j <= std::min(i, deg_lambda); ++j)
        acc ^= field_.mul(lambda[j], synd[i - j]);
      omega[i] = acc;
    }

    std::vector<Symbol> c = r;
    for (int pos : roots) {
      const Symbol xinv = field_.alpha_pow(-pos);
      Symbol num = 0, xp = 1;
      for (int i = 0; i < t2; ++i) {
        num ^= field_.mul(omega[i], xp);
        xp = field_.mul(xp, xinv);
      }
      // Formal derivative of Lambda evaluated at X^{-1}.
      Symbol den = 0;
      for (int i = 1; i <= deg_lambda; i += 2) {
        den ^= field_.mul(lambda[i], field_.pow(xinv, i - 1));
      }
      if (den == 0) return std::nullopt;
      c[pos] ^= field_.div(num, den);
    }

    // Strict bounded-distance check against the received word.
    if (!is_codeword(c)) return std::nullopt;
    int nu = 0;
    for (int i = 0; i < n_; ++i)
      if (!word.erased[i] && c[i] != word.symbols[i]) ++nu;
    if (2 * nu + e >= d_min()) return std::nullopt;
    return c;
  }

private:
  Symbol eval_at_alpha(std::span<const Symbol> poly, int power) const {
    // Horner evaluation of sum poly[i] x^i at x = alpha^power.
    const Symbol x = field_.alpha_pow(power);
    Symbol acc = 0;
    for (int i = static_cast<int>(poly.size()) - 1; i >= 0; --i)
      acc = field_.mul(acc, x) ^ poly[i];
    return acc;
  }

  static void shift_up(std::vector<Symbol>& p) {
    p.insert(p.begin(), 0);
    p.pop_back();
  }

  Field field_;
  int n_, k_;
  std::vector<Symbol> gen_;
};

}  // namespace rsrd
