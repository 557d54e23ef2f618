#include "dynareg/sketch.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "dynareg/linalg.hpp"

namespace dynareg {

namespace {

void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
}

std::size_t ceil_count(double x) {
  if (!(x >= 1.0)) return 1;
  if (x >= 1e18) return static_cast<std::size_t>(1e18);
  return static_cast<std::size_t>(std::ceil(x));
}

}  // namespace

SampleCount srht_sample_count(std::size_t n, std::size_t m, double eps, SizingMode mode, double c1) {
  check_eps(eps);
  if (m < 1 || n < m) throw std::invalid_argument("srht_sample_count: requires n >= m >= 1");
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  if (mode == SizingMode::kPractical) {
    if (!(c1 > 0.0)) throw std::invalid_argument("srht_sample_count: constant must be positive");
    const double ln_n = std::log(dn);
    return {ceil_count(c1 * dm * (std::log(dm) * ln_n + ln_n / eps)), false};
  }
  const double l = std::log(40.0 * dn * dm);
  const double first = 48.0 * 48.0 * dm * l * std::log(100.0 * 100.0 * dm * l);
  const double second = 40.0 * dm * l / eps;
  const std::size_t raw = ceil_count(std::max(first, second));
  const std::size_t cap = next_power_of_two(n);
  if (raw > cap) return {cap, true};
  return {raw, false};
}

std::size_t countsketch_sample_count(std::size_t m, double eps, SizingMode mode, double c2) {
  check_eps(eps);
  if (m < 1) throw std::invalid_argument("countsketch_sample_count: requires m >= 1");
  const double dm = static_cast<double>(m);
  const double base = dm * dm / (eps * eps);
  if (mode == SizingMode::kPractical) {
    if (!(c2 > 0.0)) throw std::invalid_argument("countsketch_sample_count: constant must be positive");
    return ceil_count(c2 * base);
  }
  return ceil_count(base * std::pow(std::log(dm / eps) + 1.0, 6));
}

SrhtSketch srht_new(std::size_t n, std::size_t r, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("srht_new: requires at least one row");
  if (r < 1) throw std::invalid_argument("srht_new: requires r >= 1");
  SrhtSketch s;
  s.n_logical = n;
  s.n_padded = next_power_of_two(n);
  s.r = r;
  s.seed = seed;
  s.scale = std::sqrt(static_cast<double>(s.n_padded) / static_cast<double>(r));
  SplitMix64 root(seed);
  SplitMix64 sign_stream = root.split();
  SplitMix64 sample_stream = root.split();
  s.signs.resize(s.n_padded);
  for (auto& x : s.signs) x = static_cast<std::int8_t>(sign_stream.sign());
  s.samples.resize(r);
  for (auto& x : s.samples) x = sample_stream.uniform_below(s.n_padded);
  return s;
}

DenseMatrix srht_apply(const SrhtSketch& s, const DenseMatrix& m) {
  if (m.rows() != s.n_logical) throw std::invalid_argument("srht_apply: row count differs from sketch width");
  DenseMatrix work(s.n_padded, m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto src = m.row(i);
    auto dst = work.row(i);
    const double sg = s.signs[i];
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] = sg * src[j];
  }
  kernels::parallel::fwht_columns(work);
  const double factor = s.scale / std::sqrt(static_cast<double>(s.n_padded));
  DenseMatrix out(s.r, m.cols());
  for (std::size_t k = 0; k < s.r; ++k) {
    auto src = work.row(s.samples[k]);
    auto dst = out.row(k);
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] = factor * src[j];
  }
  return out;
}

DenseVector srht_apply(const SrhtSketch& s, std::span<const double> b) {
  const DenseMatrix out = srht_apply(s, DenseMatrix::from_rows(b.size(), 1, DenseVector(b.begin(), b.end())));
  return {out.data().begin(), out.data().end()};
}

DenseVector srht_column(const SrhtSketch& s, std::size_t i) {
  if (i >= s.n_logical) throw std::out_of_range("srht_column: index beyond sketch width");
  const double magnitude = s.scale * s.signs[i] / std::sqrt(static_cast<double>(s.n_padded));
  DenseVector col(s.r);
  for (std::size_t k = 0; k < s.r; ++k) col[k] = (std::popcount(s.samples[k] & i) & 1) ? -magnitude : magnitude;
  return col;
}

CountSketch::CountSketch(std::size_t n, std::size_t q, std::uint64_t seed) : q_(q), seed_(seed), rng_(seed) {
  if (q < 1) throw std::invalid_argument("CountSketch: requires q >= 1");
  entries_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) entries_.push_back(draw());
}

CountSketch CountSketch::restore(std::size_t q, std::uint64_t seed, std::uint64_t rng_state,
                                 std::vector<kernels::SketchEntry> entries) {
  if (q < 1) throw std::invalid_argument("CountSketch: requires q >= 1");
  for (const auto& e : entries)
    if (e.row >= q || (e.sign != 1 && e.sign != -1)) throw std::invalid_argument("CountSketch: malformed column entry");
  CountSketch s;
  s.q_ = q;
  s.seed_ = seed;
  s.rng_.set_state(rng_state);
  s.entries_ = std::move(entries);
  return s;
}

kernels::SketchEntry CountSketch::draw() {
  kernels::SketchEntry e;
  e.row = static_cast<std::uint32_t>(rng_.uniform_below(q_));
  e.sign = static_cast<std::int8_t>(rng_.sign());
  return e;
}

kernels::SketchEntry CountSketch::add_column(std::size_t at) {
  if (at != entries_.size()) throw std::invalid_argument("CountSketch::add_column: columns are appended at the end");
  entries_.push_back(draw());
  return entries_.back();
}

kernels::SketchEntry CountSketch::remove_column(std::size_t at) {
  if (at >= entries_.size()) throw std::out_of_range("CountSketch::remove_column: index out of range");
  const kernels::SketchEntry removed = entries_[at];
  entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(at));
  return removed;
}

DenseVector CountSketch::column(std::size_t i) const {
  const auto& e = entries_.at(i);
  DenseVector col(q_, 0.0);
  col[e.row] = e.sign;
  return col;
}

DenseMatrix CountSketch::apply(const DenseMatrix& m) const {
  if (m.rows() != entries_.size()) throw std::invalid_argument("CountSketch::apply: row count differs from sketch width");
  DenseMatrix out(q_, m.cols());
  kernels::parallel::countsketch_apply(entries_, m, out);
  return out;
}

DenseVector CountSketch::apply(std::span<const double> b) const {
  if (b.size() != entries_.size()) throw std::invalid_argument("CountSketch::apply: length differs from sketch width");
  DenseVector out(q_, 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) out[entries_[i].row] += entries_[i].sign * b[i];
  return out;
}

}  // namespace dynareg
