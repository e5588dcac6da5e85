#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gibbs {

class DepthCapExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Largest cylinder depth any operation may materialize (default 12 for d=2).
int depth_cap();
void set_depth_cap(int k);

// Hard guard on d^k independent of the depth cap.
inline constexpr std::size_t kMaxCylinders = std::size_t{1} << 24;

// d^k, throwing DepthCapExceeded past the cap or the size guard.
std::size_t cylinder_count(int d, int k);

class Word {
 public:
  Word() = default;
  Word(int alphabet, std::vector<int> symbols);

  int alphabet() const { return d_; }
  int length() const { return static_cast<int>(symbols_.size()); }
  const std::vector<int>& symbols() const { return symbols_; }
  int operator[](int i) const { return symbols_[static_cast<std::size_t>(i)]; }

  Word prepend(int a) const;
  Word append(int a) const;
  Word prefix(int k) const;
  Word suffix_from(int i) const;
  std::string str() const;

  bool operator==(const Word&) const = default;

 private:
  int d_ = 2;
  std::vector<int> symbols_;
};

// Base-d integer of the word, first symbol most significant.
std::size_t index(const Word& w);
Word decode(std::size_t idx, int d, int k);
std::vector<Word> all_words(int d, int k);

class CylinderFunction {
 public:
  CylinderFunction() = default;
  CylinderFunction(int d, int depth, std::vector<double> values);

  static CylinderFunction constant(int d, double c, int depth = 0);
  // Indicator of [w], stored at depth max(|w|, depth).
  static CylinderFunction indicator(const Word& w, int depth = 0);
  static CylinderFunction from_word_fn(int d, int depth, const std::function<double(const Word&)>& fn);

  int alphabet() const { return d_; }
  int depth() const { return k_; }
  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  // Words of length >= depth; only the first `depth` symbols matter.
  double evaluate(const Word& w) const;

  CylinderFunction refine(int k) const;
  CylinderFunction compose_shift() const;
  CylinderFunction map(const std::function<double(double)>& fn) const;

  double sup_norm() const;
  double min_value() const;
  double max_value() const;

  CylinderFunction& operator+=(const CylinderFunction& o);
  CylinderFunction& operator-=(const CylinderFunction& o);
  CylinderFunction& operator*=(const CylinderFunction& o);
  CylinderFunction& operator*=(double c);
  CylinderFunction& operator+=(double c);

 private:
  int d_ = 2;
  int k_ = 0;
  std::vector<double> values_{0.0};
};

CylinderFunction operator+(CylinderFunction a, const CylinderFunction& b);
CylinderFunction operator-(CylinderFunction a, const CylinderFunction& b);
CylinderFunction operator*(CylinderFunction a, const CylinderFunction& b);
CylinderFunction operator*(double c, CylinderFunction a);
CylinderFunction operator*(CylinderFunction a, double c);
CylinderFunction operator+(CylinderFunction a, double c);
CylinderFunction operator-(CylinderFunction a, double c);
CylinderFunction operator+(double c, CylinderFunction a);
CylinderFunction operator-(double c, CylinderFunction a);
CylinderFunction operator-(CylinderFunction a);
CylinderFunction exp(const CylinderFunction& f);
CylinderFunction log(const CylinderFunction& f);

// sup |a - b| after refining both to a common depth.
double sup_distance(const CylinderFunction& a, const CylinderFunction& b);

// Value at (a, x) obtained from the value at (1-a, x); d = 2 only.
// Data supported on [0] moves to [1] and vice versa, so applying twice is the identity.
CylinderFunction mirror_apply(const CylinderFunction& f);

// f(a x) as a function of x, i.e. the pullback by the inverse branch x -> a x.
CylinderFunction prepend_pullback(const CylinderFunction& f, int a);

class CylinderMeasure {
 public:
  CylinderMeasure() = default;
  CylinderMeasure(int d, int depth, std::vector<double> weights);

  static CylinderMeasure normalized(int d, int depth, std::vector<double> weights);
  static CylinderMeasure uniform(int d, int depth);

  int alphabet() const { return d_; }
  int depth() const { return k_; }
  const std::vector<double>& weights() const { return w_; }
  double operator[](std::size_t i) const { return w_[i]; }

  double mass(const Word& w) const;
  CylinderMeasure marginal(int k) const;

 private:
  int d_ = 2;
  int k_ = 0;
  std::vector<double> w_{1.0};
};

// sum_x f[x] mu[x], with f refined to the measure depth.
double integrate(const CylinderFunction& f, const CylinderMeasure& mu);

double sup_distance(const CylinderMeasure& a, const CylinderMeasure& b);

}  // namespace gibbs
