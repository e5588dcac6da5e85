#include "gibbs/symbolic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>

namespace gibbs {

namespace {

std::atomic<int> g_depth_cap{12};

void require_alphabet(int d) {
  if (d < 2) throw std::invalid_argument("alphabet size must be >= 2");
}

void require_same_alphabet(int a, int b) {
  if (a != b) throw std::invalid_argument("alphabet mismatch");
}

}  // namespace

int depth_cap() { return g_depth_cap.load(); }

void set_depth_cap(int k) {
  if (k < 1) throw std::invalid_argument("depth cap must be >= 1");
  g_depth_cap.store(k);
}

std::size_t cylinder_count(int d, int k) {
  require_alphabet(d);
  if (k < 0) throw std::invalid_argument("negative depth");
  if (k > depth_cap())
    throw DepthCapExceeded("depth " + std::to_string(k) + " exceeds cap " + std::to_string(depth_cap()));
  std::size_t n = 1;
  for (int i = 0; i < k; ++i) {
    n *= static_cast<std::size_t>(d);
    if (n > kMaxCylinders) throw DepthCapExceeded("too many cylinders at depth " + std::to_string(k));
  }
  return n;
}

Word::Word(int alphabet, std::vector<int> symbols) : d_(alphabet), symbols_(std::move(symbols)) {
  require_alphabet(d_);
  for (int s : symbols_)
    if (s < 0 || s >= d_) throw std::invalid_argument("symbol out of range");
}

Word Word::prepend(int a) const {
  std::vector<int> s;
  s.reserve(symbols_.size() + 1);
  s.push_back(a);
  s.insert(s.end(), symbols_.begin(), symbols_.end());
  return Word(d_, std::move(s));
}

Word Word::append(int a) const {
  auto s = symbols_;
  s.push_back(a);
  return Word(d_, std::move(s));
}

Word Word::prefix(int k) const {
  if (k < 0 || k > length()) throw std::out_of_range("prefix length");
  return Word(d_, std::vector<int>(symbols_.begin(), symbols_.begin() + k));
}

Word Word::suffix_from(int i) const {
  if (i < 0 || i > length()) throw std::out_of_range("suffix start");
  return Word(d_, std::vector<int>(symbols_.begin() + i, symbols_.end()));
}

std::string Word::str() const {
  std::string out;
  for (int s : symbols_) {
    if (d_ <= 10) {
      out += static_cast<char>('0' + s);
    } else {
      if (!out.empty()) out += '.';
      out += std::to_string(s);
    }
  }
  return out;
}

std::size_t index(const Word& w) {
  std::size_t idx = 0;
  for (int s : w.symbols()) {
    if (s >= w.alphabet()) throw std::invalid_argument("symbol out of range");
    idx = idx * static_cast<std::size_t>(w.alphabet()) + static_cast<std::size_t>(s);
  }
  return idx;
}

Word decode(std::size_t idx, int d, int k) {
  std::size_t n = cylinder_count(d, k);
  if (idx >= n) throw std::out_of_range("cylinder index out of range");
  std::vector<int> s(static_cast<std::size_t>(k));
  for (int i = k - 1; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = static_cast<int>(idx % static_cast<std::size_t>(d));
    idx /= static_cast<std::size_t>(d);
  }
  return Word(d, std::move(s));
}

std::vector<Word> all_words(int d, int k) {
  std::size_t n = cylinder_count(d, k);
  std::vector<Word> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(decode(i, d, k));
  return out;
}

CylinderFunction::CylinderFunction(int d, int depth, std::vector<double> values)
    : d_(d), k_(depth), values_(std::move(values)) {
  if (values_.size() != cylinder_count(d, depth))
    throw std::invalid_argument("value array length must be d^depth");
}

CylinderFunction CylinderFunction::constant(int d, double c, int depth) {
  return CylinderFunction(d, depth, std::vector<double>(cylinder_count(d, depth), c));
}

CylinderFunction CylinderFunction::indicator(const Word& w, int depth) {
  int k = std::max(w.length(), depth);
  int d = w.alphabet();
  std::size_t n = cylinder_count(d, k);
  std::size_t block = n / cylinder_count(d, w.length());
  std::vector<double> v(n, 0.0);
  std::size_t start = index(w) * block;
  std::fill(v.begin() + static_cast<std::ptrdiff_t>(start),
            v.begin() + static_cast<std::ptrdiff_t>(start + block), 1.0);
  return CylinderFunction(d, k, std::move(v));
}

CylinderFunction CylinderFunction::from_word_fn(int d, int depth,
                                                const std::function<double(const Word&)>& fn) {
  std::size_t n = cylinder_count(d, depth);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = fn(decode(i, d, depth));
  return CylinderFunction(d, depth, std::move(v));
}

double CylinderFunction::evaluate(const Word& w) const {
  require_same_alphabet(d_, w.alphabet());
  if (w.length() < k_) throw std::invalid_argument("word shorter than function depth");
  return values_[index(w.prefix(k_))];
}

CylinderFunction CylinderFunction::refine(int k) const {
  if (k < k_) throw std::invalid_argument("refine target depth below current depth");
  if (k == k_) return *this;
  std::size_t n = cylinder_count(d_, k);
  std::size_t block = n / values_.size();
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = values_[i / block];
  return CylinderFunction(d_, k, std::move(v));
}

CylinderFunction CylinderFunction::compose_shift() const {
  std::size_t n = cylinder_count(d_, k_ + 1);
  std::size_t m = values_.size();
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = values_[i % m];
  return CylinderFunction(d_, k_ + 1, std::move(v));
}

CylinderFunction CylinderFunction::map(const std::function<double(double)>& fn) const {
  CylinderFunction out = *this;
  for (auto& x : out.values_) x = fn(x);
  return out;
}

double CylinderFunction::sup_norm() const {
  double m = 0.0;
  for (double x : values_) m = std::max(m, std::abs(x));
  return m;
}

double CylinderFunction::min_value() const { return *std::min_element(values_.begin(), values_.end()); }
double CylinderFunction::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

namespace {

template <class Op>
void combine(CylinderFunction& self, const CylinderFunction& o, Op op) {
  require_same_alphabet(self.alphabet(), o.alphabet());
  int k = std::max(self.depth(), o.depth());
  CylinderFunction a = self.refine(k);
  CylinderFunction b = o.refine(k);
  std::vector<double> v(a.values());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = op(v[i], b[i]);
  self = CylinderFunction(a.alphabet(), k, std::move(v));
}

}  // namespace

CylinderFunction& CylinderFunction::operator+=(const CylinderFunction& o) {
  combine(*this, o, std::plus<double>());
  return *this;
}

CylinderFunction& CylinderFunction::operator-=(const CylinderFunction& o) {
  combine(*this, o, std::minus<double>());
  return *this;
}

CylinderFunction& CylinderFunction::operator*=(const CylinderFunction& o) {
  combine(*this, o, std::multiplies<double>());
  return *this;
}

CylinderFunction& CylinderFunction::operator*=(double c) {
  for (auto& x : values_) x *= c;
  return *this;
}

CylinderFunction& CylinderFunction::operator+=(double c) {
  for (auto& x : values_) x += c;
  return *this;
}

CylinderFunction operator+(CylinderFunction a, const CylinderFunction& b) { return a += b; }
CylinderFunction operator-(CylinderFunction a, const CylinderFunction& b) { return a -= b; }
CylinderFunction operator*(CylinderFunction a, const CylinderFunction& b) { return a *= b; }
CylinderFunction operator*(double c, CylinderFunction a) { return a *= c; }
CylinderFunction operator*(CylinderFunction a, double c) { return a *= c; }
CylinderFunction operator+(CylinderFunction a, double c) { return a += c; }
CylinderFunction operator-(CylinderFunction a, double c) { return a += -c; }
CylinderFunction operator+(double c, CylinderFunction a) { return a += c; }
CylinderFunction operator-(double c, CylinderFunction a) { return (a *= -1.0) += c; }
CylinderFunction operator-(CylinderFunction a) { return a *= -1.0; }

CylinderFunction exp(const CylinderFunction& f) {
  return f.map([](double x) { return std::exp(x); });
}

CylinderFunction log(const CylinderFunction& f) {
  return f.map([](double x) {
    if (!(x > 0.0)) throw std::domain_error("log of non-positive cylinder value");
    return std::log(x);
  });
}

double sup_distance(const CylinderFunction& a, const CylinderFunction& b) {
  return (a - b).sup_norm();
}

CylinderFunction mirror_apply(const CylinderFunction& f) {
  if (f.alphabet() != 2) throw std::invalid_argument("mirror_apply requires d = 2");
  CylinderFunction g = f.refine(std::max(1, f.depth()));
  std::size_t half = g.size() / 2;
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < half; ++i) {
    v[i + half] = g[i];
    v[i] = g[i + half];
  }
  return CylinderFunction(2, g.depth(), std::move(v));
}

CylinderFunction prepend_pullback(const CylinderFunction& f, int a) {
  int d = f.alphabet();
  if (a < 0 || a >= d) throw std::invalid_argument("symbol out of range");
  if (f.depth() == 0) return f;
  int k = f.depth() - 1;
  std::size_t n = cylinder_count(d, k);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = f[static_cast<std::size_t>(a) * n + i];
  return CylinderFunction(d, k, std::move(v));
}

CylinderMeasure::CylinderMeasure(int d, int depth, std::vector<double> weights)
    : d_(d), k_(depth), w_(std::move(weights)) {
  if (w_.size() != cylinder_count(d, depth))
    throw std::invalid_argument("weight array length must be d^depth");
  double total = 0.0;
  for (double x : w_) {
    if (!(x >= 0.0)) throw std::invalid_argument("negative or NaN cylinder weight");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("cylinder weights must sum to 1");
}

CylinderMeasure CylinderMeasure::normalized(int d, int depth, std::vector<double> weights) {
  double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("measure has no mass");
  for (auto& x : weights) x /= total;
  return CylinderMeasure(d, depth, std::move(weights));
}

CylinderMeasure CylinderMeasure::uniform(int d, int depth) {
  std::size_t n = cylinder_count(d, depth);
  return CylinderMeasure(d, depth, std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

double CylinderMeasure::mass(const Word& w) const {
  require_same_alphabet(d_, w.alphabet());
  if (w.length() > k_) throw std::invalid_argument("word deeper than measure");
  return marginal(w.length())[index(w)];
}

CylinderMeasure CylinderMeasure::marginal(int k) const {
  if (k > k_) throw std::invalid_argument("marginal depth exceeds measure depth");
  if (k == k_) return *this;
  std::size_t n = cylinder_count(d_, k);
  std::size_t block = w_.size() / n;
  std::vector<double> v(n, 0.0);
  for (std::size_t i = 0; i < w_.size(); ++i) v[i / block] += w_[i];
  CylinderMeasure out;
  out.d_ = d_;
  out.k_ = k;
  out.w_ = std::move(v);
  return out;
}

double integrate(const CylinderFunction& f, const CylinderMeasure& mu) {
  require_same_alphabet(f.alphabet(), mu.alphabet());
  if (f.depth() > mu.depth()) throw std::invalid_argument("function deeper than measure");
  CylinderFunction g = f.refine(mu.depth());
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * mu[i];
  return s;
}

double sup_distance(const CylinderMeasure& a, const CylinderMeasure& b) {
  require_same_alphabet(a.alphabet(), b.alphabet());
  int k = std::min(a.depth(), b.depth());
  CylinderMeasure x = a.marginal(k), y = b.marginal(k);
  double m = 0.0;
  for (std::size_t i = 0; i < x.weights().size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

}  // namespace gibbs
