#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace rsrd {

using Symbol = std::uint8_t;

/// Arithmetic context for GF(2^q), q <= 8. Elements are the integers
/// [0, 2^q); 0 is the zero element and alpha^i = antilog(i) enumerates the
/// multiplicative group in generator order.
class Field {
public:
  Field(int q, unsigned primitive_poly) : q_(q), poly_(primitive_poly) {
    if (q < 1 || q > 8)
      throw std::invalid_argument("Field: q must be in 1..8");
    if (primitive_poly >> q != 1u)
      throw std::invalid_argument("Field: defining polynomial must have degree q");
    const unsigned sz = 1u << q;
    log_.assign(sz, 0);
    antilog_.assign(sz, 0);
    std::vector<bool> seen(sz, false);
    unsigned x = 1;
    for (unsigned i = 0; i < sz - 1; ++i) {
      if (seen[x])
        throw std::invalid_argument("Field: polynomial is not primitive");
      seen[x] = true;
      antilog_[i] = static_cast<Symbol>(x);
      log_[x] = static_cast<Symbol>(i);
      x <<= 1;
      if (x & sz) x ^= primitive_poly;
    }
    if (x != 1)
      throw std::invalid_argument("Field: polynomial is not primitive");
  }

  static Field gf16() { return Field(4, 0b10011); }
  static Field gf256() { return Field(8, 0x11D); }

  int q() const { return q_; }
  unsigned primitive_poly() const { return poly_; }
  unsigned size() const { return 1u << q_; }
  unsigned order() const { return size() - 1; }  // multiplicative group order
  unsigned n_max() const { return order(); }

  Symbol add(Symbol a, Symbol b) const { return a ^ b; }

  Symbol mul(Symbol a, Symbol b) const {
    if (a == 0 || b == 0) return 0;
    return antilog_[(log_[a] + log_[b]) % order()];
  }

  Symbol inv(Symbol a) const {
    if (a == 0) throw std::domain_error("Field::inv: zero has no inverse");
    return antilog_[(order() - log_[a]) % order()];
  }

  Symbol div(Symbol a, Symbol b) const { return mul(a, inv(b)); }

  /// a^e for any integer exponent; 0^0 = 1.
  Symbol pow(Symbol a, long long e) const {
    if (a == 0) {
      if (e == 0) return 1;
      if (e < 0) throw std::domain_error("Field::pow: negative power of zero");
      return 0;
    }
    long long le = (static_cast<long long>(log_[a]) * e) % static_cast<long long>(order());
    if (le < 0) le += order();
    return antilog_[le];
  }

  /// alpha^i with the exponent reduced mod 2^q - 1.
  Symbol alpha_pow(long long i) const {
    long long r = i % static_cast<long long>(order());
    if (r < 0) r += order();
    return antilog_[r];
  }

  int log(Symbol a) const {
    if (a == 0) throw std::domain_error("Field::log: log of zero");
    return log_[a];
  }

private:
  int q_;
  unsigned poly_;
  std::vector<Symbol> log_, antilog_;
};

}  // namespace rsrd
