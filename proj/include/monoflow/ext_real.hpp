#pragma once

#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace monoflow {

// Extended real for convex-analysis values.  Infinities are explicit tags,
// not IEEE payloads, so arithmetic stays auditable.  The one indeterminate
// sum (-inf) + (+inf) resolves to +inf (the sup-of-affine convention) and
// bumps a process-wide counter callers can inspect.
class ExtReal {
 public:
  ExtReal() = default;
  ExtReal(double v) {  // implicit on purpose: finite doubles promote silently
    if (std::isnan(v)) throw std::invalid_argument("ExtReal: NaN");
    if (std::isinf(v))
      tag_ = v > 0 ? Tag::pos : Tag::neg;
    else
      val_ = v;
  }

  static ExtReal pos_inf() { return ExtReal(Tag::pos); }
  static ExtReal neg_inf() { return ExtReal(Tag::neg); }

  bool finite() const { return tag_ == Tag::fin; }
  bool is_pos_inf() const { return tag_ == Tag::pos; }
  bool is_neg_inf() const { return tag_ == Tag::neg; }

  // Finite payload, or the matching IEEE infinity for printing/comparisons.
  double as_double() const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return tag_ == Tag::fin ? val_ : (tag_ == Tag::pos ? inf : -inf);
  }
  // Finite payload; throws on infinities.
  double finite_value() const {
    if (!finite()) throw std::domain_error("ExtReal: value is infinite");
    return val_;
  }

  ExtReal operator-() const {
    if (tag_ == Tag::pos) return neg_inf();
    if (tag_ == Tag::neg) return pos_inf();
    return ExtReal(-val_);
  }

  friend ExtReal operator+(const ExtReal& a, const ExtReal& b) {
    if (a.tag_ == Tag::fin && b.tag_ == Tag::fin) return ExtReal(a.val_ + b.val_);
    bool pos = a.tag_ == Tag::pos || b.tag_ == Tag::pos;
    bool neg = a.tag_ == Tag::neg || b.tag_ == Tag::neg;
    if (pos && neg) {
      ++indeterminate_count_;
      return pos_inf();
    }
    return pos ? pos_inf() : neg_inf();
  }
  ExtReal& operator+=(const ExtReal& o) { return *this = *this + o; }
  friend ExtReal operator-(const ExtReal& a, const ExtReal& b) { return a + (-b); }

  // Scaling by a positive scalar (the only case the library needs).
  friend ExtReal operator*(double c, const ExtReal& a) {
    if (c <= 0) throw std::invalid_argument("ExtReal: scale must be positive");
    return a.tag_ == Tag::fin ? ExtReal(c * a.val_) : a;
  }

  friend bool operator<(const ExtReal& a, const ExtReal& b) {
    if (a.tag_ != b.tag_) return rank(a.tag_) < rank(b.tag_);
    return a.tag_ == Tag::fin && a.val_ < b.val_;
  }
  friend bool operator>(const ExtReal& a, const ExtReal& b) { return b < a; }
  friend bool operator<=(const ExtReal& a, const ExtReal& b) { return !(b < a); }
  friend bool operator>=(const ExtReal& a, const ExtReal& b) { return !(a < b); }
  friend bool operator==(const ExtReal& a, const ExtReal& b) {
    return a.tag_ == b.tag_ && (a.tag_ != Tag::fin || a.val_ == b.val_);
  }
  friend bool operator!=(const ExtReal& a, const ExtReal& b) { return !(a == b); }

  static long indeterminate_sum_count() { return indeterminate_count_.load(); }

 private:
  enum class Tag { neg, fin, pos };
  explicit ExtReal(Tag t) : tag_(t) {}
  static int rank(Tag t) { return t == Tag::neg ? 0 : (t == Tag::fin ? 1 : 2); }

  Tag tag_ = Tag::fin;
  double val_ = 0.0;
  inline static std::atomic<long> indeterminate_count_{0};
};

}  // namespace monoflow
