#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace vqt {

bool is_prime(int n);

/// (p, n) with p^n == q, or nullopt when q is not a prime power.
std::optional<std::pair<int, int>> prime_power(int q);

/// Finite field GF(p^n) with table-driven arithmetic, for p^n <= 64.
///
/// An element is encoded as the integer sum_k c_k p^k, where c_0..c_{n-1} are
/// its polynomial coefficients over Z_p. The elements 0..p-1 form the prime
/// subfield.
class GaloisField {
 public:
  static constexpr int kMaxOrder = 64;

  /// `modulus` holds the coefficients of a monic degree-n polynomial, lowest
  /// degree first (size n + 1). Throws InvalidInput if p is not prime or the
  /// polynomial is reducible, UnsupportedSize if p^n exceeds kMaxOrder.
  GaloisField(int p, int n, std::vector<int> modulus);

  /// Field of the given prime-power order using a fixed (Conway) modulus.
  static GaloisField of_order(int q);

  int characteristic() const { return p_; }
  int degree() const { return n_; }
  int order() const { return q_; }
  const std::vector<int>& modulus() const { return modulus_; }

  /// e.g. "x^2+2x+2".
  std::string modulus_string() const;

  int add(int a, int b) const { return add_[idx(a, b)]; }
  int sub(int a, int b) const { return add(a, neg_[b]); }
  int neg(int a) const { return neg_[a]; }
  int mul(int a, int b) const { return mul_[idx(a, b)]; }
  /// Throws InvalidInput for a == 0.
  int inv(int a) const;
  int pow(int a, long long e) const;

  /// Absolute trace a + a^p + ... + a^(p^(n-1)), a value in Z_p.
  int trace(int a) const { return trace_[a]; }

  std::vector<int> coefficients(int a) const;
  int from_coefficients(const std::vector<int>& c) const;

 private:
  std::size_t idx(int a, int b) const { return static_cast<std::size_t>(a) * q_ + b; }

  int p_;
  int n_;
  int q_;
  std::vector<int> modulus_;
  std::vector<int> add_;
  std::vector<int> mul_;
  std::vector<int> neg_;
  std::vector<int> inv_;
  std::vector<int> trace_;
};

/// True when the monic polynomial (lowest degree first) has no nontrivial
/// factor over Z_p. Exhaustive search over monic divisors.
bool is_irreducible(int p, const std::vector<int>& poly);

}  // namespace vqt
