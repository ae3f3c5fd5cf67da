#include "vqt/galois.hpp"

#include <map>

#include "vqt/error.hpp"

namespace vqt {

bool is_prime(int n) {
  if (n < 2) return false;
  for (int k = 2; k * k <= n; ++k) {
    if (n % k == 0) return false;
  }
  return true;
}

std::optional<std::pair<int, int>> prime_power(int q) {
  if (q < 2) return std::nullopt;
  int p = 2;
  while (q % p != 0) ++p;
  int n = 0;
  int rest = q;
  while (rest % p == 0) {
    rest /= p;
    ++n;
  }
  if (rest != 1) return std::nullopt;
  return std::make_pair(p, n);
}

namespace {

using Poly = std::vector<int>;  // lowest degree first

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

int mod_inverse(int a, int p) {
  for (int x = 1; x < p; ++x) {
    if ((a * x) % p == 1) return x;
  }
  throw InvalidInput("no inverse mod p");
}

// Remainder of a divided by b over Z_p.
Poly poly_mod(Poly a, Poly b, int p) {
  trim(a);
  trim(b);
  const int lead_inv = mod_inverse(b.back(), p);
  while (a.size() >= b.size() && !a.empty()) {
    const int factor = (a.back() * lead_inv) % p;
    const std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) {
      a[shift + i] = ((a[shift + i] - factor * b[i]) % p + p) % p;
    }
    trim(a);
  }
  return a;
}

// Conway polynomials for the non-prime orders up to 64.
const std::map<int, Poly>& conway_table() {
  static const std::map<int, Poly> table = {
      {4, {1, 1, 1}},             // x^2+x+1
      {8, {1, 1, 0, 1}},          // x^3+x+1
      {16, {1, 1, 0, 0, 1}},      // x^4+x+1
      {32, {1, 0, 1, 0, 0, 1}},   // x^5+x^2+1
      {64, {1, 1, 0, 1, 1, 0, 1}},  // x^6+x^4+x^3+x+1
      {9, {2, 2, 1}},             // x^2+2x+2
      {27, {1, 2, 0, 1}},         // x^3+2x+1
      {25, {2, 4, 1}},            // x^2+4x+2
      {49, {3, 6, 1}},            // x^2+6x+3
  };
  return table;
}

}  // namespace

bool is_irreducible(int p, const std::vector<int>& poly) {
  Poly f = poly;
  trim(f);
  const int deg = static_cast<int>(f.size()) - 1;
  if (deg < 1) return false;
  // Enumerate every monic polynomial of degree 1..deg/2 as a candidate divisor.
  for (int k = 1; 2 * k <= deg; ++k) {
    int count = 1;
    for (int i = 0; i < k; ++i) count *= p;
    for (int code = 0; code < count; ++code) {
      Poly g(k + 1, 0);
      int c = code;
      for (int i = 0; i < k; ++i) {
        g[i] = c % p;
        c /= p;
      }
      g[k] = 1;
      if (poly_mod(f, g, p).empty()) return false;
    }
  }
  return true;
}

GaloisField::GaloisField(int p, int n, std::vector<int> modulus)
    : p_(p), n_(n), modulus_(std::move(modulus)) {
  if (!is_prime(p)) throw InvalidInput("field characteristic must be prime");
  if (n < 1) throw InvalidInput("field degree must be at least 1");
  q_ = 1;
  for (int i = 0; i < n; ++i) {
    q_ *= p;
    if (q_ > kMaxOrder) throw UnsupportedSize("field order exceeds 64");
  }
  if (static_cast<int>(modulus_.size()) != n + 1 || modulus_.back() != 1) {
    throw InvalidInput("modulus must be monic of degree n");
  }
  for (int c : modulus_) {
    if (c < 0 || c >= p) throw InvalidInput("modulus coefficient outside Z_p");
  }
  if (!is_irreducible(p, modulus_)) throw InvalidInput("modulus polynomial is reducible");

  const auto qs = static_cast<std::size_t>(q_);
  add_.resize(qs * qs);
  mul_.resize(qs * qs);
  neg_.resize(qs);
  inv_.assign(qs, 0);
  trace_.resize(qs);

  for (int a = 0; a < q_; ++a) {
    const auto ca = coefficients(a);
    Poly cn(n_);
    for (int k = 0; k < n_; ++k) cn[k] = (p_ - ca[k]) % p_;
    neg_[a] = from_coefficients(cn);
    for (int b = 0; b < q_; ++b) {
      const auto cb = coefficients(b);
      Poly sum(n_);
      for (int k = 0; k < n_; ++k) sum[k] = (ca[k] + cb[k]) % p_;
      add_[idx(a, b)] = from_coefficients(sum);

      Poly prod(2 * n_ - 1, 0);
      for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) prod[i + j] = (prod[i + j] + ca[i] * cb[j]) % p_;
      }
      Poly r = poly_mod(prod, modulus_, p_);
      r.resize(n_, 0);
      mul_[idx(a, b)] = from_coefficients(r);
    }
  }
  for (int a = 1; a < q_; ++a) {
    for (int b = 1; b < q_; ++b) {
      if (mul(a, b) == 1) {
        inv_[a] = b;
        break;
      }
    }
  }
  for (int a = 0; a < q_; ++a) {
    int term = a;
    int total = 0;
    for (int k = 0; k < n_; ++k) {
      total = add(total, term);
      term = pow(term, p_);
    }
    if (total >= p_) throw InvalidInput("trace left the prime subfield");
    trace_[a] = total;
  }
}

GaloisField GaloisField::of_order(int q) {
  const auto pp = prime_power(q);
  if (!pp) throw UnsupportedDimension(std::to_string(q) + " is not a prime power");
  if (q > kMaxOrder) throw UnsupportedSize("field order exceeds 64");
  const auto [p, n] = *pp;
  if (n == 1) return GaloisField(p, 1, {0, 1});
  return GaloisField(p, n, conway_table().at(q));
}

std::string GaloisField::modulus_string() const {
  std::string out;
  for (int k = n_; k >= 0; --k) {
    const int c = modulus_[k];
    if (c == 0) continue;
    if (!out.empty()) out += "+";
    if (k == 0 || c != 1) out += std::to_string(c);
    if (k >= 1) out += "x";
    if (k >= 2) out += "^" + std::to_string(k);
  }
  return out;
}

int GaloisField::inv(int a) const {
  if (a == 0) throw InvalidInput("zero has no multiplicative inverse");
  return inv_[a];
}

int GaloisField::pow(int a, long long e) const {
  int result = 1;
  int base = a;
  while (e > 0) {
    if (e & 1) result = mul(result, base);
    base = mul(base, base);
    e >>= 1;
  }
  return result;
}

std::vector<int> GaloisField::coefficients(int a) const {
  std::vector<int> c(n_);
  for (int k = 0; k < n_; ++k) {
    c[k] = a % p_;
    a /= p_;
  }
  return c;
}

int GaloisField::from_coefficients(const std::vector<int>& c) const {
  int a = 0;
  for (int k = n_ - 1; k >= 0; --k) a = a * p_ + c[k];
  return a;
}

}  // namespace vqt
