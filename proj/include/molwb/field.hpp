#pragma once

// Exact *-fields used to coordinatize subspace ortholattices:
//   Q        rationals, identity involution
//   Q(i)     Gaussian rationals, complex conjugation
//   GF(p)    prime fields, identity involution
//
// Each field is a small descriptor object (`RationalField`, `GaussianField`,
// `PrimeField`) exposing `element_type`, constants and text parsing. Elements
// carry value semantics and the usual arithmetic operators.

#include <gmpxx.h>

#include <algorithm>
#include <cctype>
#include <concepts>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>

namespace molwb {

class FieldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Q

/// Arbitrary-precision rational, always in lowest terms with positive
/// denominator.
class Rational {
 public:
  Rational() = default;
  Rational(long long n) : v_(static_cast<long>(n)) {}  // NOLINT(google-explicit-constructor)
  Rational(long long n, long long d) {
    if (d == 0) throw FieldError("rational with zero denominator");
    v_ = mpq_class(mpz_class(static_cast<long>(n)), mpz_class(static_cast<long>(d)));
    v_.canonicalize();
  }
  explicit Rational(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }

  /// Accepts "n" or "n/d" with optional sign.
  static Rational parse(std::string_view text) {
    std::string s = detail::trim(text);
    if (s.empty()) throw FieldError("empty rational literal");
    for (std::size_t i = 0; i < s.size(); ++i) {
      char c = s[i];
      bool ok = std::isdigit(static_cast<unsigned char>(c)) || c == '/' || ((c == '-' || c == '+') && i == 0);
      if (!ok) throw FieldError("invalid rational literal '" + s + "'");
    }
    if (s.front() == '+') s.erase(0, 1);
    mpq_class q;
    if (q.set_str(s, 10) != 0) throw FieldError("invalid rational literal '" + s + "'");
    if (q.get_den() == 0) throw FieldError("rational with zero denominator");
    return Rational(std::move(q));
  }

  const mpq_class& value() const { return v_; }
  mpz_class numerator() const { return v_.get_num(); }
  mpz_class denominator() const { return v_.get_den(); }
  bool is_zero() const { return sgn(v_) == 0; }
  int sign() const { return sgn(v_); }
  Rational conj() const { return *this; }
  double to_double() const { return v_.get_d(); }
  std::string to_string() const { return v_.get_str(); }

  Rational operator-() const { return Rational(mpq_class(-v_)); }
  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw FieldError("division by zero");
    v_ /= o.v_;
    return *this;
  }
  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

 private:
  mpq_class v_{0};
};

struct RationalField {
  using element_type = Rational;
  element_type zero() const { return Rational(0); }
  element_type one() const { return Rational(1); }
  element_type from_int(long long n) const { return Rational(n); }
  element_type parse(std::string_view s) const { return Rational::parse(s); }
  std::string name() const { return "Q"; }
  friend bool operator==(const RationalField&, const RationalField&) { return true; }
};

// ---------------------------------------------------------------------------
// Q(i)

class GaussianRational {
 public:
  GaussianRational() = default;
  GaussianRational(Rational re) : re_(std::move(re)) {}  // NOLINT(google-explicit-constructor)
  GaussianRational(long long re) : re_(re) {}            // NOLINT(google-explicit-constructor)
  GaussianRational(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {}

  /// Accepts "a", "bi", "a+bi", "a-bi" with rational a, b; "i" alone means 1i.
  static GaussianRational parse(std::string_view text) {
    std::string s = detail::trim(text);
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    if (s.empty()) throw FieldError("empty Gaussian literal");
    if (s.back() != 'i') return GaussianRational(Rational::parse(s));
    std::string body = s.substr(0, s.size() - 1);
    // Split at the last sign that is not the leading one.
    std::size_t split = std::string::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
      if (body[k] == '+' || body[k] == '-') {
        split = k;
        break;
      }
    }
    auto imag_of = [](std::string part) {
      if (part.empty() || part == "+") return Rational(1);
      if (part == "-") return Rational(-1);
      return Rational::parse(part);
    };
    if (split == std::string::npos) return GaussianRational(Rational(0), imag_of(body));
    return GaussianRational(Rational::parse(body.substr(0, split)), imag_of(body.substr(split)));
  }

  const Rational& re() const { return re_; }
  const Rational& im() const { return im_; }
  bool is_zero() const { return re_.is_zero() && im_.is_zero(); }
  GaussianRational conj() const { return {re_, -im_}; }
  /// a * conj(a), a nonnegative rational.
  Rational norm() const { return re_ * re_ + im_ * im_; }

  std::string to_string() const {
    if (im_.is_zero()) return re_.to_string();
    std::string imag = im_.to_string() + "i";
    if (re_.is_zero()) return imag;
    return re_.to_string() + (im_.sign() > 0 ? "+" : "") + imag;
  }

  GaussianRational operator-() const { return {-re_, -im_}; }
  GaussianRational& operator+=(const GaussianRational& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  GaussianRational& operator-=(const GaussianRational& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  GaussianRational& operator*=(const GaussianRational& o) {
    Rational re = re_ * o.re_ - im_ * o.im_;
    Rational im = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(re);
    im_ = std::move(im);
    return *this;
  }
  GaussianRational& operator/=(const GaussianRational& o) {
    if (o.is_zero()) throw FieldError("division by zero");
    Rational n = o.norm();
    *this *= o.conj();
    re_ /= n;
    im_ /= n;
    return *this;
  }
  friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
  friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
  friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend std::ostream& operator<<(std::ostream& os, const GaussianRational& g) { return os << g.to_string(); }

 private:
  Rational re_;
  Rational im_;
};

struct GaussianField {
  using element_type = GaussianRational;
  element_type zero() const { return GaussianRational(0); }
  element_type one() const { return GaussianRational(1); }
  element_type i() const { return GaussianRational(Rational(0), Rational(1)); }
  element_type from_int(long long n) const { return GaussianRational(n); }
  element_type parse(std::string_view s) const { return GaussianRational::parse(s); }
  std::string name() const { return "Qi"; }
  friend bool operator==(const GaussianField&, const GaussianField&) { return true; }
};

// ---------------------------------------------------------------------------
// GF(p)

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

class Residue {
 public:
  Residue() = default;
  Residue(long long value, std::uint64_t p) : p_(p) {
    if (!is_prime(p)) throw FieldError("modulus " + std::to_string(p) + " is not prime");
    long long m = static_cast<long long>(p);
    v_ = static_cast<std::uint64_t>(((value % m) + m) % m);
  }

  /// Accepts "v mod p".
  static Residue parse(std::string_view text) {
    std::string s = detail::trim(text);
    auto at = s.find("mod");
    if (at == std::string::npos) throw FieldError("expected 'v mod p', got '" + s + "'");
    try {
      long long v = std::stoll(s.substr(0, at));
      long long p = std::stoll(s.substr(at + 3));
      if (p <= 0) throw FieldError("nonpositive modulus");
      return Residue(v, static_cast<std::uint64_t>(p));
    } catch (const std::logic_error&) {
      throw FieldError("invalid residue literal '" + s + "'");
    }
  }

  std::uint64_t value() const { return v_; }
  std::uint64_t modulus() const { return p_; }
  bool is_zero() const { return v_ == 0; }
  Residue conj() const { return *this; }
  std::string to_string() const { return std::to_string(v_) + " mod " + std::to_string(p_); }

  Residue inverse() const {
    if (v_ == 0) throw FieldError("division by zero");
    return pow(p_ - 2);
  }
  Residue pow(std::uint64_t e) const {
    Residue base = *this, acc = make(1, p_);
    while (e) {
      if (e & 1U) acc *= base;
      base *= base;
      e >>= 1U;
    }
    return acc;
  }

  Residue operator-() const { return make(v_ == 0 ? 0 : p_ - v_, p_); }
  Residue& operator+=(const Residue& o) {
    check(o);
    v_ = (v_ + o.v_) % p_;
    return *this;
  }
  Residue& operator-=(const Residue& o) {
    check(o);
    v_ = (v_ + p_ - o.v_) % p_;
    return *this;
  }
  Residue& operator*=(const Residue& o) {
    check(o);
    v_ = static_cast<std::uint64_t>((static_cast<unsigned __int128>(v_) * o.v_) % p_);
    return *this;
  }
  Residue& operator/=(const Residue& o) {
    check(o);
    return *this *= o.inverse();
  }
  friend Residue operator+(Residue a, const Residue& b) { return a += b; }
  friend Residue operator-(Residue a, const Residue& b) { return a -= b; }
  friend Residue operator*(Residue a, const Residue& b) { return a *= b; }
  friend Residue operator/(Residue a, const Residue& b) { return a /= b; }
  friend bool operator==(const Residue& a, const Residue& b) {
    a.check(b);
    return a.v_ == b.v_;
  }
  friend std::ostream& operator<<(std::ostream& os, const Residue& r) { return os << r.to_string(); }

 private:
  static Residue make(std::uint64_t v, std::uint64_t p) {
    Residue r;
    r.v_ = v;
    r.p_ = p;
    return r;
  }
  void check(const Residue& o) const {
    if (p_ != o.p_) {
      throw FieldError("mixed fields: GF(" + std::to_string(p_) + ") and GF(" + std::to_string(o.p_) + ")");
    }
  }

  std::uint64_t v_ = 0;
  std::uint64_t p_ = 2;
};

class PrimeField {
 public:
  using element_type = Residue;
  explicit PrimeField(std::uint64_t p) : p_(p) {
    if (!is_prime(p)) throw FieldError("GF(" + std::to_string(p) + "): modulus is not prime");
  }
  std::uint64_t modulus() const { return p_; }
  element_type zero() const { return Residue(0, p_); }
  element_type one() const { return Residue(1, p_); }
  element_type from_int(long long n) const { return Residue(n, p_); }
  /// Accepts "v mod p" (p must match) or a bare integer.
  element_type parse(std::string_view s) const {
    if (s.find("mod") != std::string_view::npos) {
      Residue r = Residue::parse(s);
      if (r.modulus() != p_) throw FieldError("mixed fields: literal '" + std::string(s) + "' in " + name());
      return r;
    }
    try {
      return Residue(std::stoll(std::string(s)), p_);
    } catch (const std::logic_error&) {
      throw FieldError("invalid residue literal '" + std::string(s) + "'");
    }
  }
  std::string name() const { return "GF" + std::to_string(p_); }
  friend bool operator==(const PrimeField& a, const PrimeField& b) { return a.p_ == b.p_; }

 private:
  std::uint64_t p_;
};

template <class F>
concept ExactField = requires(const F f, const typename F::element_type a, std::string_view s) {
  { f.zero() } -> std::same_as<typename F::element_type>;
  { f.one() } -> std::same_as<typename F::element_type>;
  { f.from_int(1LL) } -> std::same_as<typename F::element_type>;
  { f.parse(s) } -> std::same_as<typename F::element_type>;
  { f.name() } -> std::convertible_to<std::string>;
  { a + a } -> std::same_as<typename F::element_type>;
  { a * a } -> std::same_as<typename F::element_type>;
  { a / a } -> std::same_as<typename F::element_type>;
  { -a } -> std::same_as<typename F::element_type>;
  { a.conj() } -> std::same_as<typename F::element_type>;
  { a.is_zero() } -> std::same_as<bool>;
  { a.to_string() } -> std::convertible_to<std::string>;
};

/// Fields whose canonical form is provably anisotropic by positivity.
template <class F>
inline constexpr bool is_formally_real_v = std::is_same_v<F, RationalField> || std::is_same_v<F, GaussianField>;

}  // namespace molwb
