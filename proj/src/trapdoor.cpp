/*
 * Copyright 2026 The AHIBET Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "ahibet/trapdoor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>

#include "ahibet/errors.hpp"
#include "ahibet/kernels.hpp"
#include "basis_internal.hpp"
#include "exact_solve.hpp"
#include "modp_internal.hpp"

namespace ahibet {

namespace {

bool is_zero(const ModMatrix& m) {
  return std::all_of(m.data().begin(), m.data().end(),
                     [](u64 v) { return v == 0; });
}

// Babai nearest-plane reduction of x against basis columns [0, upto), last
// column first. `cols` is the column-major double copy of the basis.
void nearest_plane_reduce(const IntMatrix& basis, const std::vector<double>& cols,
                          const GramSchmidtData& gs, std::size_t upto,
                          IntVector& x, std::vector<i64>* coeffs = nullptr) {
  const std::size_t dim = basis.rows();
  std::vector<double> xd(x.begin(), x.end());
  for (std::size_t i = upto; i-- > 0;) {
    const double nsq = gs.norms[i] * gs.norms[i];
    const double k = std::nearbyint(kernels::dot(xd.data(), gs.column(i), dim) / nsq);
    if (k == 0.0) continue;
    kernels::axpy(-k, cols.data() + i * dim, xd.data(), dim);
    const i64 ki = static_cast<i64>(k);
    if (coeffs) (*coeffs)[i] += ki;
    for (std::size_t r = 0; r < dim; ++r) {
      const i64 b = basis.at(r, i);
      if (b != 0) x[r] = checked_add(x[r], checked_mul(-ki, b));
    }
  }
}

double ratio(const mpz_class& a, const mpz_class& b) {
  long ea = 0, eb = 0;
  const double ma = mpz_get_d_2exp(&ea, a.get_mpz_t());
  const double mb = mpz_get_d_2exp(&eb, b.get_mpz_t());
  return std::ldexp(ma / mb, static_cast<int>(ea - eb));
}

double log_mpz(const mpz_class& v) {
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, v.get_mpz_t());
  return std::log(std::abs(mant)) + static_cast<double>(exp) * std::log(2.0);
}

// r * y exactly as mant * 2^e, for a double y (|y| >= 2^-30 resolution).
void scaled_double(const mpz_class& r, double y, mpz_class& mant, long& e) {
  const double ay = std::max(std::abs(y), 0x1.0p-30);
  e = std::ilogb(ay) - 52;
  mant = r * mpz_class(static_cast<long>(std::llround(std::ldexp(y, static_cast<int>(-e)))));
}

// For the completed column k and an integer coefficient z, the integer
// vector z t_k minus the lattice vector sum_i floor(z coeff_i / denom) b_i,
// i.e. sum_i frac(z coeff_i / denom) b_i + (z / index) aux. Its distance
// to z t_k lies in the lattice of the preceding columns.
IntVector completion_offset(const IntMatrix& b, const std::vector<double>& cols,
                            const detail::Completion& c, const mpz_class& z) {
  const std::size_t dim = b.rows();
  std::vector<double> wd(dim, 0.0);
  mpz_class t;
  const bool fast = mpz_sizeinbase(z.get_mpz_t(), 2) + 64 <= c.shift;
  for (std::size_t i = 0; i < c.column; ++i) {
    double frac = 0.0;
    if (fast) {
      t = z * c.scaled[i];
      mpz_fdiv_r_2exp(t.get_mpz_t(), t.get_mpz_t(), c.shift);
      long e = 0;
      const double mant = mpz_get_d_2exp(&e, t.get_mpz_t());
      frac = std::ldexp(mant, static_cast<int>(e - static_cast<long>(c.shift)));
    } else {
      t = z * c.coeff[i];
      mpz_fdiv_r(t.get_mpz_t(), t.get_mpz_t(), c.denom.get_mpz_t());
      if (t != 0) frac = ratio(t, c.denom);
    }
    if (frac != 0.0) kernels::axpy(frac, cols.data() + i * dim, wd.data(), dim);
  }
  mpz_class quo, rem;
  mpz_fdiv_qr(quo.get_mpz_t(), rem.get_mpz_t(), z.get_mpz_t(), c.index.get_mpz_t());
  if (!quo.fits_slong_p()) throw Error(Errc::kOverflow, "completion coefficient overflows");
  // The integer part quo * aux can be far beyond double precision when the
  // completed direction is short, so only the fractional part is rounded.
  const i64 zq = quo.get_si();
  const double zf = rem == 0 ? 0.0 : ratio(rem, c.index);
  IntVector w(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const double v = wd[i] + zf * static_cast<double>(c.aux[i]);
    const double rv = std::nearbyint(v);
    if (!(std::abs(v - rv) < 1e-3)) {
      throw Error(Errc::kInconsistent, "completed column lost precision");
    }
    w[i] = checked_add(static_cast<i64>(rv), checked_mul(zq, c.aux[i]));
  }
  return w;
}

// Coefficient of the completed column in a randomized nearest-plane step:
// D_{Z, sigma index / |aux~|, index phi}. Wide enough that it is drawn as a
// continuous Gaussian whose bits below double precision are made uniform.
mpz_class sample_completed(const detail::Completion& c, double phi, double sigma,
                           RandomSource& rng) {
  const double tau = sigma / c.aux_norm;
  if (mpz_sizeinbase(c.index.get_mpz_t(), 2) <= 40) {
    const double r = c.index.get_d();
    return mpz_class(static_cast<long>(sample_z({tau * r, phi * r, kTailcut}, rng)));
  }
  double g = 0.0;
  do {
    const double u1 = 1.0 - rng.uniform_double();
    const double u2 = rng.uniform_double();
    g = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    g /= std::sqrt(2.0 * std::numbers::pi);
  } while (std::abs(g) > kTailcut);
  const double y = phi + tau * g;
  mpz_class z;
  long e = 0;
  scaled_double(c.index, y, z, e);
  mpz_class width = c.index;  // index * 2^e, at least 1
  if (e >= 0) {
    mpz_mul_2exp(z.get_mpz_t(), z.get_mpz_t(), static_cast<unsigned long>(e));
    mpz_mul_2exp(width.get_mpz_t(), width.get_mpz_t(), static_cast<unsigned long>(e));
  } else {
    mpz_fdiv_q_2exp(z.get_mpz_t(), z.get_mpz_t(), static_cast<unsigned long>(-e));
    mpz_cdiv_q_2exp(width.get_mpz_t(), width.get_mpz_t(), static_cast<unsigned long>(-e));
  }
  const std::size_t bytes = (mpz_sizeinbase(width.get_mpz_t(), 2) + 64 + 7) / 8;
  std::vector<unsigned char> buf(bytes);
  rng.fill(buf);
  mpz_class u;
  mpz_import(u.get_mpz_t(), bytes, 1, 1, 0, 0, buf.data());
  mpz_fdiv_r(u.get_mpz_t(), u.get_mpz_t(), width.get_mpz_t());
  return z + u;
}

// Nearest-plane reduction of x against the first `upto` columns of a basis
// that may carry a completed column.
void reduce_against(const ShortBasis& basis, const std::vector<double>& cols,
                    std::size_t upto, IntVector& x) {
  const detail::Completion* comp = detail::BasisAccess::completion(basis);
  if (!comp || comp->column >= upto) {
    nearest_plane_reduce(basis.b(), cols, basis.gs(), upto, x);
    return;
  }
  const std::size_t dim = basis.b().rows(), k = comp->column;
  // Columns after k first, then k exactly, then the prefix.
  const GramSchmidtData& gs = basis.gs();
  std::vector<double> xd(x.begin(), x.end());
  for (std::size_t i = upto; i-- > k + 1;) {
    const double nsq = gs.norms[i] * gs.norms[i];
    const double kk = std::nearbyint(kernels::dot(xd.data(), gs.column(i), dim) / nsq);
    if (kk == 0.0) continue;
    kernels::axpy(-kk, cols.data() + i * dim, xd.data(), dim);
    const i64 ki = static_cast<i64>(kk);
    for (std::size_t r = 0; r < dim; ++r) {
      const i64 b = basis.b().at(r, i);
      if (b != 0) x[r] = checked_add(x[r], checked_mul(-ki, b));
    }
  }
  const double phi = kernels::dot(xd.data(), comp->aux_gs.data(), dim) /
                     (comp->aux_norm * comp->aux_norm);
  mpz_class z, half;
  long e = 0;
  scaled_double(comp->index, phi, z, e);
  // round(index * phi) = floor(index * phi + 1/2)
  if (e >= 0) {
    mpz_mul_2exp(z.get_mpz_t(), z.get_mpz_t(), static_cast<unsigned long>(e));
  } else {
    half = 1;
    mpz_mul_2exp(half.get_mpz_t(), half.get_mpz_t(), static_cast<unsigned long>(-e - 1));
    z += half;
    mpz_fdiv_q_2exp(z.get_mpz_t(), z.get_mpz_t(), static_cast<unsigned long>(-e));
  }
  if (z != 0) {
    const IntVector w = completion_offset(basis.b(), cols, *comp, z);
    for (std::size_t r = 0; r < dim; ++r) x[r] = checked_add(x[r], -w[r]);
  }
  nearest_plane_reduce(basis.b(), cols, gs, k, x);
}

// Draws lattice points of width sigma until `basis.dim()` independent ones
// are found, within a budget of ten times that many draws.
IntMatrix collect_independent(const ShortBasis& basis, double sigma,
                              RandomSource& rng, SamplingStats* stats) {
  const std::size_t dim = basis.dim();
  const std::vector<double> zero(dim, 0.0);
  detail::IndependenceTracker tracker(dim);
  std::vector<IntVector> kept;
  kept.reserve(dim);
  std::size_t draws = 0;
  while (kept.size() < dim) {
    if (draws == 10 * dim) {
      if (stats) stats->draws = draws;
      throw Error(Errc::kBudget, "no full-rank set after " +
                                     std::to_string(draws) + " draws");
    }
    IntVector v = sample_lattice(basis, sigma, zero, rng);
    ++draws;
    if (tracker.add(v)) kept.push_back(std::move(v));
  }
  if (stats) stats->draws = draws;
  return IntMatrix::from_columns(kept, dim);
}

// (f_lift * x) / q for a lattice vector x, exactly.
IntVector quotient_column(const ModMatrix& f, const IntVector& x) {
  IntVector out(f.rows());
  const i128 q = f.q();
  for (std::size_t i = 0; i < f.rows(); ++i) {
    i128 acc = 0;
    for (std::size_t k = 0; k < f.cols(); ++k) {
      if (x[k] == 0) continue;
      i128 term = static_cast<i128>(f.at(i, k)) * x[k];
      if (__builtin_add_overflow(acc, term, &acc)) {
        throw Error(Errc::kOverflow, "to_basis: product overflows");
      }
    }
    if (acc % q != 0) throw Error(Errc::kInconsistent, "vector is not in the lattice");
    const i128 v = acc / q;
    if (v > INT64_MAX || v < INT64_MIN) throw Error(Errc::kOverflow, "to_basis: quotient overflows");
    out[i] = static_cast<i64>(v);
  }
  return out;
}

// Kernel vector of a matrix mod a prime too large for the Barrett path.
std::optional<std::vector<u64>> kernel_vector_large(std::vector<u64> m,
                                                    std::size_t rows,
                                                    std::size_t cols, u64 p) {
  std::vector<std::size_t> pivot_cols;
  std::size_t rank = 0;
  std::optional<std::size_t> free_col;
  for (std::size_t c = 0; c < cols; ++c) {
    std::size_t piv = rank;
    while (piv < rows && m[piv * cols + c] == 0) ++piv;
    if (piv == rows) {
      free_col = c;
      break;
    }
    std::swap_ranges(m.begin() + piv * cols, m.begin() + (piv + 1) * cols,
                     m.begin() + rank * cols);
    const u64 inv = inv_mod(m[rank * cols + c], p);
    for (std::size_t k = c; k < cols; ++k) {
      m[rank * cols + k] = mul_mod(m[rank * cols + k], inv, p);
    }
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == rank) continue;
      const u64 f = m[r * cols + c];
      if (f == 0) continue;
      for (std::size_t k = c; k < cols; ++k) {
        m[r * cols + k] = sub_mod(m[r * cols + k], mul_mod(f, m[rank * cols + k], p), p);
      }
    }
    pivot_cols.push_back(c);
    ++rank;
  }
  if (!free_col) return std::nullopt;
  std::vector<u64> y(cols, 0);
  y[*free_col] = 1;
  for (std::size_t i = 0; i < pivot_cols.size(); ++i) {
    y[pivot_cols[i]] = neg_mod(m[i * cols + *free_col], p);
  }
  return y;
}

double log_volume(const GramSchmidtData& gs) {
  double s = 0.0;
  for (double v : gs.norms) s += std::log(v);
  return s;
}

void check_membership(const ModMatrix& f, const IntMatrix& b) {
  if (b.rows() != f.cols() || b.cols() != b.rows()) {
    throw Error(Errc::kDimension, "basis must be square with one row per column of the matrix");
  }
  if (!is_zero(mixed_mul_mod(f, b))) {
    throw Error(Errc::kInconsistent, "basis vectors are not in the lattice");
  }
}

}  // namespace

// ------------------------------------------------------------- ShortBasis

ShortBasis::ShortBasis(ModMatrix for_matrix, IntMatrix b)
    : for_matrix_(std::move(for_matrix)), b_(std::move(b)) {
  check_membership(for_matrix_, b_);
  gs_ = std::make_shared<const GramSchmidtData>(gram_schmidt(b_));
  cache_ = std::make_shared<detail::BasisCache>();
}

double ShortBasis::log_volume() const {
  if (!completion_) return ahibet::log_volume(*gs_);
  double s = 0.0;
  for (std::size_t i = 0; i < gs_->count; ++i) {
    if (i != completion_->column) s += std::log(gs_->norms[i]);
  }
  return s + std::log(completion_->aux_norm) - log_mpz(completion_->index);
}

namespace detail {

ShortBasis BasisAccess::make(ModMatrix f, IntMatrix b, GramSchmidtData gs,
                             std::shared_ptr<const Completion> completion) {
  check_membership(f, b);
  if (gs.dim != b.rows() || gs.count != b.cols()) {
    throw Error(Errc::kDimension, "Gram-Schmidt data does not match the basis");
  }
  ShortBasis out;
  out.for_matrix_ = std::move(f);
  out.b_ = std::move(b);
  out.gs_ = std::make_shared<const GramSchmidtData>(std::move(gs));
  out.completion_ = std::move(completion);
  out.cache_ = std::make_shared<BasisCache>();
  return out;
}

ShortBasis BasisAccess::restore(ModMatrix f, IntMatrix b, std::optional<Completion> completion) {
  if (!completion) return ShortBasis(std::move(f), std::move(b));
  Completion& c = *completion;
  const std::size_t dim = b.rows();
  if (b.cols() != dim || c.column >= dim || c.aux.size() != dim || c.coeff.size() != c.column ||
      c.denom <= 0 || c.index <= 1) {
    throw Error(Errc::kDimension, "completed column: malformed description");
  }
  // denom * index * t_k == index * sum coeff_i b_i + denom * aux
  for (std::size_t row = 0; row < dim; ++row) {
    mpz_class lhs = c.denom * c.index * b.at(row, c.column);
    mpz_class rhs = c.denom * c.aux[row];
    for (std::size_t i = 0; i < c.column; ++i) rhs += c.index * c.coeff[i] * b.at(row, i);
    if (lhs != rhs) throw Error(Errc::kInconsistent, "completed column: identity does not hold");
  }
  IntMatrix s = b;
  s.set_column(c.column, c.aux);
  GramSchmidtData gs = gram_schmidt(s);
  c.aux_gs.assign(gs.column(c.column), gs.column(c.column) + dim);
  c.aux_norm = gs.norms[c.column];
  gs.norms[c.column] = ratio(mpz_class(1), c.index) * c.aux_norm;
  gs.max_norm = *std::max_element(gs.norms.begin(), gs.norms.end());
  c.prepare();
  return make(std::move(f), std::move(b), std::move(gs),
              std::make_shared<const Completion>(std::move(c)));
}

void Completion::prepare() {
  shift = mpz_sizeinbase(index.get_mpz_t(), 2) + 192;
  scaled.resize(coeff.size());
  for (std::size_t i = 0; i < coeff.size(); ++i) {
    mpz_fdiv_r(scaled[i].get_mpz_t(), coeff[i].get_mpz_t(), denom.get_mpz_t());
    mpz_mul_2exp(scaled[i].get_mpz_t(), scaled[i].get_mpz_t(), shift);
    mpz_fdiv_q(scaled[i].get_mpz_t(), scaled[i].get_mpz_t(), denom.get_mpz_t());
  }
}

const std::vector<double>& BasisAccess::columns(const ShortBasis& basis) {
  BasisCache& cache = *basis.cache_;
  std::call_once(cache.cols_once, [&] { cache.cols = to_column_major(basis.b()); });
  return cache.cols;
}

const ModPrimeLu* BasisAccess::transposed_lu(const ShortBasis& basis) {
  BasisCache& cache = *basis.cache_;
  std::call_once(cache.once, [&] {
    const IntMatrix bt = basis.b().transpose();
    for (u64 p : {u64{2147483647}, u64{2147483629}, u64{2147483587}}) {
      ModPrimeLu lu(bt, p);
      if (lu.invertible()) {
        cache.lu_transposed.emplace(std::move(lu));
        return;
      }
    }
  });
  return cache.lu_transposed ? &*cache.lu_transposed : nullptr;
}

}  // namespace detail

IntVector sample_lattice(const ShortBasis& basis, double sigma,
                         std::span<const double> center, RandomSource& rng) {
  const detail::Completion* comp = detail::BasisAccess::completion(basis);
  const std::size_t special = comp ? comp->column : basis.dim();
  const IntMatrix& b = basis.b();
  const GramSchmidtData& gs = basis.gs();
  const std::size_t dim = b.rows(), count = b.cols();
  if (center.size() != dim) throw Error(Errc::kDimension, "sample_lattice: center length");
  const double bound = gs.max_norm * gs_slack(static_cast<double>(count));
  if (!(sigma >= bound)) {
    throw Error(Errc::kPrecondition, "sample_lattice: sigma " + std::to_string(sigma) +
                                         " below bound " + std::to_string(bound));
  }
  const std::vector<double>& cols = detail::BasisAccess::columns(basis);
  std::vector<double> c(center.begin(), center.end());
  std::vector<i64> z(count, 0);
  IntVector offset(dim, 0);
  for (std::size_t i = count; i-- > 0;) {
    if (i == special) {
      const double phi = kernels::dot(c.data(), comp->aux_gs.data(), dim) /
                         (comp->aux_norm * comp->aux_norm);
      const mpz_class zk = sample_completed(*comp, phi, sigma, rng);
      offset = completion_offset(b, cols, *comp, zk);
      for (std::size_t r = 0; r < dim; ++r) c[r] -= static_cast<double>(offset[r]);
      continue;
    }
    const double nsq = gs.norms[i] * gs.norms[i];
    const double ci = kernels::dot(c.data(), gs.column(i), dim) / nsq;
    const i64 zi = sample_z({sigma / gs.norms[i], ci, kTailcut}, rng);
    z[i] = zi;
    if (zi != 0) kernels::axpy(-static_cast<double>(zi), cols.data() + i * dim, c.data(), dim);
  }
  IntVector v(dim);
  for (std::size_t r = 0; r < dim; ++r) {
    i128 acc = offset[r];
    for (std::size_t j = 0; j < count; ++j) acc += static_cast<i128>(b.at(r, j)) * z[j];
    if (acc > INT64_MAX || acc < INT64_MIN) {
      throw Error(Errc::kOverflow, "sample_lattice: lattice point overflows");
    }
    v[r] = static_cast<i64>(acc);
  }
  return v;
}

// ----------------------------------------------------------------- gadget

ModMatrix gadget_matrix(std::size_t n, u64 q) {
  if (n == 0 || q < 2) throw Error(Errc::kDimension, "gadget needs n >= 1, q >= 2");
  const unsigned k = ceil_log2(q);
  ModMatrix g(n, n * k, q);
  for (std::size_t i = 0; i < n; ++i) {
    for (unsigned j = 0; j < k; ++j) g.set(i, i * k + j, (u64{1} << j) % q);
  }
  return g;
}

ShortBasis gadget_basis(std::size_t n, u64 q) {
  const unsigned k = ceil_log2(q);
  const std::size_t w = n * k;
  const bool power_of_two = (q & (q - 1)) == 0;
  IntMatrix t(w, w);
  for (std::size_t blk = 0; blk < n; ++blk) {
    const std::size_t o = blk * k;
    for (unsigned j = 0; j + 1 < k; ++j) {
      t.set(o + j, o + j, 2);
      t.set(o + j + 1, o + j, -1);
    }
    if (power_of_two) {
      t.set(o + k - 1, o + k - 1, 2);
    } else {
      for (unsigned i = 0; i < k; ++i) t.set(o + i, o + k - 1, (q >> i) & 1);
    }
  }
  return ShortBasis(gadget_matrix(n, q), std::move(t));
}

IntVector gadget_solve(std::size_t n, u64 q, const ModVector& v) {
  if (v.size() != n) throw Error(Errc::kDimension, "gadget_solve: length differs");
  const unsigned k = ceil_log2(q);
  IntVector x(n * k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (unsigned j = 0; j < k; ++j) x[i * k + j] = static_cast<i64>((v[i] >> j) & 1);
  }
  return x;
}

// --------------------------------------------------------------- trapdoor

double default_trapdoor_width(std::size_t n) {
  return gs_slack(static_cast<double>(n));
}

GadgetTrapdoor make_trapdoor(ModMatrix a, IntMatrix r, ModMatrix tag) {
  const std::size_t n = a.rows();
  const u64 q = a.q();
  const ModMatrix g = gadget_matrix(n, q);
  if (r.rows() != a.cols() || r.cols() != g.cols() || tag.rows() != n ||
      tag.cols() != n || tag.q() != q) {
    throw Error(Errc::kDimension, "trapdoor shapes disagree");
  }
  inverse_mod(tag);  // throws if singular
  const ModMatrix hg = mat_mul_mod(tag, g);
  ModMatrix f = hconcat(a, add_mod(mixed_mul_mod(a, r), hg));
  const IntMatrix lift = vconcat(negate(r), IntMatrix::identity(g.cols()));
  if (mixed_mul_mod(f, lift) != hg) {
    throw Error(Errc::kInconsistent, "trapdoor identity F [-R; I] = H G fails");
  }
  return GadgetTrapdoor{std::move(a), std::move(r), std::move(tag), std::move(f)};
}

GadgetTrapdoor trap_gen(std::size_t n, std::size_t m, u64 q, const ModMatrix& tag,
                        double sigma_r, RandomSource& rng) {
  if (m < n * ceil_log2(q)) {
    throw Error(Errc::kPrecondition, "trap_gen needs m >= n ceil(log2 q)");
  }
  inverse_mod(tag);
  std::vector<u64> data(n * m);
  for (auto& v : data) v = rng.uniform_below(q);
  ModMatrix a(n, m, q, std::move(data));
  IntMatrix r = sample_z_matrix(m, n * ceil_log2(q), sigma_r, rng);
  return make_trapdoor(std::move(a), std::move(r), tag);
}

ShortBasis trapdoor_to_basis(const GadgetTrapdoor& t) {
  const std::size_t n = t.a.rows(), m = t.a.cols();
  const u64 q = t.a.q();
  const ShortBasis tg = gadget_basis(n, q);
  const std::size_t w = tg.dim();
  // Columns of W solve G W = -H^{-1} A.
  const ModMatrix target = mat_mul_mod(inverse_mod(t.tag), t.a);
  IntMatrix wm(w, m);
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<u64> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = neg_mod(target.at(i, j), q);
    const IntVector x = gadget_solve(n, q, ModVector(std::move(col), q));
    wm.set_column(j, x);
  }
  const IntMatrix rw = int_mul(t.r, wm);
  const IntMatrix rt = int_mul(t.r, tg.b());
  // Gadget block first: its Gram-Schmidt vectors are those of T_G, and the
  // remaining columns reduce to unit vectors, so |S~| <= (s1(R) + 1) |T_G~|.
  IntMatrix s(m + w, m + w);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < w; ++j) s.set(i, j, -rt.at(i, j));
    for (std::size_t j = 0; j < m; ++j) {
      s.set(i, w + j, checked_add(i == j ? 1 : 0, -rw.at(i, j)));
    }
  }
  for (std::size_t i = 0; i < w; ++i) {
    for (std::size_t j = 0; j < w; ++j) s.set(m + i, j, tg.b().at(i, j));
    for (std::size_t j = 0; j < m; ++j) s.set(m + i, w + j, wm.at(i, j));
  }
  return ShortBasis(t.f, std::move(s));
}

// ------------------------------------------------------------- preimages

IntMatrix sample_pre(const ModMatrix& f, const ShortBasis& basis,
                     const ModMatrix& u, double sigma, RandomSource& rng) {
  const std::size_t dim = basis.dim();
  if (f.cols() != dim || u.rows() != f.rows() || u.q() != f.q()) {
    throw Error(Errc::kDimension, "sample_pre: shapes disagree");
  }
  if (basis.for_matrix() != f) {
    throw Error(Errc::kInconsistent, "sample_pre: basis belongs to another matrix");
  }
  const double bound = basis.gs_norm() * gs_slack(static_cast<double>(dim));
  if (!(sigma >= bound)) {
    throw Error(Errc::kPrecondition, "sample_pre: sigma " + std::to_string(sigma) +
                                         " below bound " + std::to_string(bound));
  }
  const RightSolver solver(f);
  const std::vector<double>& cols = detail::BasisAccess::columns(basis);
  IntMatrix out(dim, u.cols());
  for (std::size_t c = 0; c < u.cols(); ++c) {
    IntVector x0 = solver.solve(u.column(c));
    reduce_against(basis, cols, dim, x0);
    std::vector<double> center(dim);
    for (std::size_t i = 0; i < dim; ++i) center[i] = -static_cast<double>(x0[i]);
    const IntVector v = sample_lattice(basis, sigma, center, rng);
    IntVector x(dim);
    for (std::size_t i = 0; i < dim; ++i) x[i] = checked_add(x0[i], v[i]);
    out.set_column(c, x);
  }
  if (mixed_mul_mod(f, out) != u) {
    throw Error(Errc::kInconsistent, "sample_pre: preimage check failed");
  }
  return out;
}

double sample_right_min_sigma(const GadgetTrapdoor& t) {
  return 5.0 * s1_upper(t.r) * gs_slack(static_cast<double>(t.a.rows()));
}

IntMatrix sample_right(const GadgetTrapdoor& t, const ModMatrix& u,
                       double sigma, RandomSource& rng) {
  const double bound = sample_right_min_sigma(t);
  if (!(sigma >= bound)) {
    throw Error(Errc::kPrecondition, "sample_right: sigma " + std::to_string(sigma) +
                                         " below 5 s1(R) slack = " + std::to_string(bound));
  }
  return sample_pre(t.f, trapdoor_to_basis(t), u, sigma, rng);
}

ShortBasis sample_basis_right(const GadgetTrapdoor& t, double sigma,
                              RandomSource& rng, SamplingStats* stats) {
  const double bound = sample_right_min_sigma(t);
  if (!(sigma >= bound)) {
    throw Error(Errc::kPrecondition, "sample_basis_right: sigma " + std::to_string(sigma) +
                                         " below 5 s1(R) slack = " + std::to_string(bound));
  }
  const ShortBasis start = trapdoor_to_basis(t);
  const IntMatrix s = collect_independent(start, sigma, rng, stats);
  return to_basis(s, start);
}

ShortBasis sample_basis_left(const ModMatrix& a, const ModMatrix& m_ext,
                             const ShortBasis& t_a, double sigma,
                             RandomSource& rng, SamplingStats* stats) {
  const std::size_t total = a.cols() + m_ext.cols();
  const double bound = t_a.gs_norm() * gs_slack(static_cast<double>(total));
  if (!(sigma >= bound)) {
    throw Error(Errc::kPrecondition, "sample_basis_left: sigma " + std::to_string(sigma) +
                                         " below bound " + std::to_string(bound));
  }
  const ShortBasis ext = extend_basis(ModMatrix(a.rows(), 0, a.q()), a, m_ext, t_a);
  const IntMatrix s = collect_independent(ext, sigma, rng, stats);
  return to_basis(s, ext);
}

ShortBasis extend_basis(const ModMatrix& a1, const ModMatrix& a2,
                        const ModMatrix& a3, const ShortBasis& t2) {
  if (a1.rows() != a2.rows() || a3.rows() != a2.rows() || a1.q() != a2.q() ||
      a3.q() != a2.q()) {
    throw Error(Errc::kDimension, "extend_basis: blocks disagree");
  }
  if (t2.for_matrix() != a2) {
    throw Error(Errc::kInconsistent, "extend_basis: basis belongs to another matrix");
  }
  const std::size_t m1 = a1.cols(), m2 = a2.cols(), m3 = a3.cols();
  const std::size_t total = m1 + m2 + m3;
  const u64 q = a2.q();
  IntMatrix t(total, total);
  // Columns: t2 embedded, then one column per a1 coordinate, then per a3.
  for (std::size_t i = 0; i < m2; ++i) {
    for (std::size_t j = 0; j < m2; ++j) t.set(m1 + i, j, t2.b().at(i, j));
  }
  if (m1 + m3 > 0) {
    const RightSolver solver(a2);
    const std::vector<double>& cols = detail::BasisAccess::columns(t2);
    auto fill = [&](const ModMatrix& src, std::size_t j, std::size_t unit_row,
                    std::size_t out_col) {
      std::vector<u64> target(src.rows());
      for (std::size_t i = 0; i < src.rows(); ++i) target[i] = neg_mod(src.at(i, j), q);
      IntVector w = solver.solve(ModVector(std::move(target), q));
      reduce_against(t2, cols, m2, w);
      for (std::size_t i = 0; i < m2; ++i) t.set(m1 + i, out_col, w[i]);
      t.set(unit_row, out_col, 1);
    };
    for (std::size_t j = 0; j < m1; ++j) fill(a1, j, j, m2 + j);
    for (std::size_t j = 0; j < m3; ++j) fill(a3, j, m1 + m2 + j, m2 + m1 + j);
  }
  // The Gram-Schmidt vectors are those of t2 followed by unit vectors.
  GramSchmidtData gs;
  gs.dim = gs.count = total;
  gs.ortho.assign(total * total, 0.0);
  gs.norms.assign(total, 1.0);
  const GramSchmidtData& g2 = t2.gs();
  for (std::size_t j = 0; j < m2; ++j) {
    std::copy(g2.column(j), g2.column(j) + m2, gs.ortho.begin() + j * total + m1);
    gs.norms[j] = g2.norms[j];
  }
  for (std::size_t j = 0; j < m1; ++j) gs.ortho[(m2 + j) * total + j] = 1.0;
  for (std::size_t j = 0; j < m3; ++j) gs.ortho[(m2 + m1 + j) * total + m1 + m2 + j] = 1.0;
  gs.max_norm = (m1 + m3 > 0) ? std::max(1.0, g2.max_norm) : g2.max_norm;
  std::shared_ptr<const detail::Completion> comp;
  if (const detail::Completion* c2 = detail::BasisAccess::completion(t2)) {
    auto c = std::make_shared<detail::Completion>(*c2);
    c->aux.assign(total, 0);
    c->aux_gs.assign(total, 0.0);
    std::copy(c2->aux.begin(), c2->aux.end(), c->aux.begin() + m1);
    std::copy(c2->aux_gs.begin(), c2->aux_gs.end(), c->aux_gs.begin() + m1);
    comp = std::move(c);
  }
  return detail::BasisAccess::make(hconcat(hconcat(a1, a2), a3), std::move(t),
                                   std::move(gs), std::move(comp));
}

namespace {

// Replaces columns of s[0, count) so that they become a basis of the lattice
// points in their span, given that this span holds `index` times more
// lattice points than they generate. Each prime p of the index yields y with
// s y == 0 and k y == 0 (mod p), hence the lattice vector s y / p; it replaces
// the last column y touches, whose Gram-Schmidt vector shrinks by p.
// Returns false when an expected torsion vector does not exist.
bool saturate_prefix(const ModMatrix& f, IntMatrix& s, GramSchmidtData& gs,
                     std::size_t count, u64 index) {
  if (index <= 1) return true;
  const std::size_t dim = s.rows(), n = f.rows();
  IntMatrix k(n, count);
  for (std::size_t j = 0; j < count; ++j) {
    const IntVector kj = quotient_column(f, s.column(j));
    for (std::size_t i = 0; i < n; ++i) k.set(i, j, kj[i]);
  }
  for (u64 p : factorize(index)) {
    std::optional<std::vector<u64>> y;
    if (p < (u64{1} << 31)) {
      detail::ModPrimeMatrix nm(dim + n, count, p);
      for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < count; ++j) nm.set(i, j, s.at(i, j));
      }
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < count; ++j) nm.set(dim + i, j, k.at(i, j));
      }
      y = nm.kernel_vector();
    } else {
      std::vector<u64> nm((dim + n) * count);
      for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < count; ++j) nm[i * count + j] = reduce_signed(s.at(i, j), p);
      }
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < count; ++j) {
          nm[(dim + i) * count + j] = reduce_signed(k.at(i, j), p);
        }
      }
      y = kernel_vector_large(std::move(nm), dim + n, count, p);
    }
    if (!y) return false;
    std::size_t j = count;
    while (j-- > 0 && (*y)[j] == 0) {
    }
    const u64 inv = inv_mod((*y)[j], p);
    std::vector<i64> yc(j + 1);
    for (std::size_t i = 0; i <= j; ++i) yc[i] = center_lift(mul_mod((*y)[i], inv, p), p);
    IntVector x(dim);
    for (std::size_t r = 0; r < dim; ++r) {
      i128 acc = 0;
      for (std::size_t i = 0; i <= j; ++i) {
        if (yc[i] != 0) acc += static_cast<i128>(yc[i]) * s.at(r, i);
      }
      if (acc % static_cast<i128>(p) != 0) {
        throw Error(Errc::kInconsistent, "to_basis: combination is not divisible");
      }
      const i128 v = acc / static_cast<i128>(p);
      if (v > INT64_MAX || v < INT64_MIN) throw Error(Errc::kOverflow, "to_basis: overflow");
      x[r] = static_cast<i64>(v);
    }
    // Earlier Gram-Schmidt vectors are untouched, so they size-reduce x.
    nearest_plane_reduce(s, to_column_major(s), gs, j, x);
    s.set_column(j, x);
    double* gj = gs.ortho.data() + j * dim;
    for (std::size_t i = 0; i < dim; ++i) gj[i] /= static_cast<double>(p);
    gs.norms[j] /= static_cast<double>(p);
    const IntVector kj = quotient_column(f, x);
    for (std::size_t i = 0; i < n; ++i) k.set(i, j, kj[i]);
  }
  return true;
}

}  // namespace

ShortBasis to_basis(const IntMatrix& independent, const ShortBasis& reference) {
  const std::size_t dim = reference.dim();
  if (independent.rows() != dim || independent.cols() != dim) {
    throw Error(Errc::kDimension, "to_basis: need a square set of the lattice dimension");
  }
  const ModMatrix& f = reference.for_matrix();
  if (!is_zero(mixed_mul_mod(f, independent))) {
    throw Error(Errc::kInconsistent, "to_basis: vectors are not in the lattice");
  }
  const GramSchmidtData gs0 = gram_schmidt(independent);  // throws on dependence
  const double log_ref = reference.log_volume();
  const double log_index = log_volume(gs0) - log_ref;
  if (log_index < -1e-6) {
    throw Error(Errc::kInconsistent, "to_basis: set spans more than the lattice");
  }
  if (log_index < 1e-6) return ShortBasis(f, independent);

  // The basis keeps the flag of the input: its first dim-1 columns generate
  // the lattice points in the span of the first dim-1 inputs, and the last
  // column v completes them. Writing v = S c, c_last must be 1/r where r is
  // the index of that prefix lattice plus s_last inside the whole lattice;
  // r and c come from exact solves S c = b for reference vectors b.
  const std::size_t last = dim - 1;
  const detail::RationalSolver solver(independent);
  std::vector<detail::RationalVector> sols;
  // One reference column usually suffices; otherwise the exact last
  // coordinates of all reference columns pick the columns that do.
  std::vector<std::size_t> order{last};
  bool widened = false;
  for (std::size_t probes = 1; probes <= order.size(); ++probes) {
    sols.push_back(solver.solve(reference.b().column(order[probes - 1])));
    auto widen = [&] {
      if (widened) return;
      widened = true;
      const IntMatrix st = independent.transpose();
      const detail::RationalSolver tsolver(st);
      IntVector e(dim, 0);
      e[last] = 1;
      const detail::RationalVector yv = tsolver.solve(e);
      std::vector<std::pair<mpz_class, std::size_t>> dens;
      mpz_class acc, g, full = 1, have = 1;
      for (std::size_t j = 0; j < dim; ++j) {
        acc = 0;
        for (std::size_t i = 0; i < dim; ++i) {
          const i64 b = reference.b().at(i, j);
          if (b > 0) mpz_addmul_ui(acc.get_mpz_t(), yv.num[i].get_mpz_t(), static_cast<unsigned long>(b));
          if (b < 0) mpz_submul_ui(acc.get_mpz_t(), yv.num[i].get_mpz_t(), static_cast<unsigned long>(-b));
        }
        mpz_gcd(g.get_mpz_t(), acc.get_mpz_t(), yv.denom.get_mpz_t());
        dens.emplace_back(yv.denom / g, j);
        mpz_lcm(full.get_mpz_t(), full.get_mpz_t(), dens.back().first.get_mpz_t());
        if (std::find(order.begin(), order.end(), j) != order.end()) {
          mpz_lcm(have.get_mpz_t(), have.get_mpz_t(), dens.back().first.get_mpz_t());
        }
      }
      std::stable_sort(dens.begin(), dens.end(),
                       [](const auto& x, const auto& y) { return x.first > y.first; });
      for (const auto& [den, j] : dens) {
        if (have == full) break;
        if (std::find(order.begin(), order.end(), j) != order.end()) continue;
        mpz_class next;
        mpz_lcm(next.get_mpz_t(), have.get_mpz_t(), den.get_mpz_t());
        if (next == have) continue;
        have = next;
        order.push_back(j);
      }
      // Whatever remains, in order, as a last resort.
      for (std::size_t j = 0; j < dim; ++j) {
        if (std::find(order.begin(), order.end(), j) == order.end()) order.push_back(j);
      }
    };
    // phi_j = last coordinate of S^{-1} b_j, in lowest terms.
    mpz_class r = 1, g;
    std::vector<mpz_class> phi_num(probes), phi_den(probes);
    for (std::size_t j = 0; j < probes; ++j) {
      mpz_gcd(g.get_mpz_t(), sols[j].num[last].get_mpz_t(), sols[j].denom.get_mpz_t());
      phi_num[j] = sols[j].num[last] / g;
      phi_den[j] = sols[j].denom / g;
      mpz_lcm(r.get_mpz_t(), r.get_mpz_t(), phi_den[j].get_mpz_t());
    }
    const double log_prefix = log_index - log_mpz(r);
    const double prefix_index = std::nearbyint(std::exp(log_prefix));
    if (!(prefix_index >= 1.0) || prefix_index > 0x1.0p40 ||
        std::abs(log_prefix - std::log(prefix_index)) > 1e-6) {
      widen();
      continue;  // r is underestimated; probe more reference vectors
    }
    // sum_j x_j a_j + y r == 1 with a_j = phi_j r.
    std::vector<mpz_class> x(probes, 0);
    mpz_class acc_g = r, y = 1, alpha, beta, aj, ng;
    for (std::size_t j = 0; j < probes && acc_g != 1; ++j) {
      aj = phi_num[j] * (r / phi_den[j]);
      mpz_gcdext(ng.get_mpz_t(), alpha.get_mpz_t(), beta.get_mpz_t(),
                 acc_g.get_mpz_t(), aj.get_mpz_t());
      for (std::size_t i = 0; i < j; ++i) x[i] *= alpha;
      y *= alpha;
      x[j] = beta;
      acc_g = ng;
    }
    if (acc_g != 1) {
      widen();
      continue;
    }
    // c = sum_j x_j S^{-1} b_j + y e_last, reduced mod 1 coordinatewise.
    mpz_class common = 1;
    for (const auto& sol : sols) mpz_lcm(common.get_mpz_t(), common.get_mpz_t(), sol.denom.get_mpz_t());
    std::vector<mpz_class> c(dim, 0);
    for (std::size_t j = 0; j < probes; ++j) {
      if (x[j] == 0) continue;
      const mpz_class scale = x[j] * (common / sols[j].denom);
      for (std::size_t i = 0; i < dim; ++i) c[i] += scale * sols[j].num[i];
    }
    c[last] += y * common;
    for (auto& ci : c) mpz_fdiv_r(ci.get_mpz_t(), ci.get_mpz_t(), common.get_mpz_t());
    if (c[last] * r != common) {
      throw Error(Errc::kInconsistent, "to_basis: completion coefficient mismatch");
    }
    IntVector v(dim);
    mpz_class sum;
    for (std::size_t row = 0; row < dim; ++row) {
      sum = 0;
      for (std::size_t i = 0; i < dim; ++i) {
        const i64 e = independent.at(row, i);
        if (e > 0) mpz_addmul_ui(sum.get_mpz_t(), c[i].get_mpz_t(), static_cast<unsigned long>(e));
        if (e < 0) mpz_submul_ui(sum.get_mpz_t(), c[i].get_mpz_t(), static_cast<unsigned long>(-e));
      }
      if (!mpz_divisible_p(sum.get_mpz_t(), common.get_mpz_t())) {
        throw Error(Errc::kInconsistent, "to_basis: completion is not integral");
      }
      sum /= common;
      if (!sum.fits_slong_p()) throw Error(Errc::kOverflow, "to_basis: completion overflows");
      v[row] = sum.get_si();
    }

    IntMatrix s = independent;
    GramSchmidtData gs = gs0;
    if (!saturate_prefix(f, s, gs, last, static_cast<u64>(prefix_index))) {
      widen();
      continue;
    }
    std::vector<i64> shift(dim, 0);
    nearest_plane_reduce(s, to_column_major(s), gs, last, v, &shift);
    if (mpz_sizeinbase(r.get_mpz_t(), 2) <= 20) {
      // The last Gram-Schmidt vector is still comfortably representable.
      s.set_column(last, v);
      ShortBasis out(f, std::move(s));
      if (std::abs(out.log_volume() - log_ref) > 1e-6) {
        throw Error(Errc::kInconsistent, "to_basis: result does not span the lattice");
      }
      return out;
    }
    // Keep s_last as the auxiliary vector of the completed column and
    // express v exactly in terms of the prefix and s_last.
    const GramSchmidtData gs_aux = gram_schmidt(s);
    auto comp = std::make_shared<detail::Completion>();
    comp->column = last;
    comp->aux = s.column(last);
    comp->aux_gs.assign(gs_aux.column(last), gs_aux.column(last) + dim);
    comp->aux_norm = gs_aux.norms[last];
    comp->index = r;
    if (prefix_index == 1.0) {
      // Same prefix as the input, so v = S (c - shift) directly.
      comp->coeff.resize(last);
      for (std::size_t i = 0; i < last; ++i) comp->coeff[i] = c[i] - shift[i] * common;
      comp->denom = common;
    } else {
      const auto rep = detail::solve_rational(s, IntMatrix::from_columns({v}, dim));
      if (rep[0].num[last] * r != rep[0].denom) {
        throw Error(Errc::kInconsistent, "to_basis: completion coefficient mismatch");
      }
      comp->coeff.assign(rep[0].num.begin(), rep[0].num.begin() + last);
      comp->denom = rep[0].denom;
    }
    comp->prepare();
    GramSchmidtData gs_out = gs_aux;
    gs_out.norms[last] = ratio(mpz_class(1), r) * comp->aux_norm;
    gs_out.max_norm = *std::max_element(gs_out.norms.begin(), gs_out.norms.end());
    s.set_column(last, v);
    ShortBasis out = detail::BasisAccess::make(f, std::move(s), std::move(gs_out), std::move(comp));
    if (std::abs(out.log_volume() - log_ref) > 1e-6) {
      throw Error(Errc::kInconsistent, "to_basis: result does not span the lattice");
    }
    return out;
  }
  throw Error(Errc::kInconsistent, "to_basis: could not complete the basis");
}

// ---------------------------------------------------------------- inversion

namespace {

// Integer e with e^T b = w^T via the cached LU of b^T modulo a prime,
// verified exactly; falls back to solve_int.
IntVector solve_by_cache(const ShortBasis& t, const IntVector& w) {
  const detail::ModPrimeLu* lu = detail::BasisAccess::transposed_lu(t);
  if (lu) {
    const u64 p = lu->p();
    const std::size_t dim = w.size();
    std::vector<u64> rhs(dim), sol;
    for (std::size_t i = 0; i < dim; ++i) rhs[i] = reduce_signed(w[i], p);
    lu->solve(rhs, sol);
    IntVector e(dim);
    for (std::size_t i = 0; i < dim; ++i) e[i] = center_lift(sol[i], p);
    bool ok = true;
    for (std::size_t j = 0; j < dim && ok; ++j) {
      i128 acc = 0;
      for (std::size_t i = 0; i < dim; ++i) acc += static_cast<i128>(e[i]) * t.b().at(i, j);
      ok = acc == w[j];
    }
    if (ok) return e;
  }
  return solve_int(t.b(), w);
}

}  // namespace

LweSolution invert_lwe(const ModMatrix& a, const ShortBasis& t,
                       const ModVector& y) {
  const std::size_t dim = a.cols();
  const u64 q = a.q();
  if (t.dim() != dim || y.size() != dim || y.q() != q) {
    throw Error(Errc::kDimension, "invert_lwe: shapes disagree");
  }
  const ModMatrix yrow(1, dim, q, std::vector<u64>(y.values().begin(), y.values().end()));
  const ModMatrix yt = mixed_mul_mod(yrow, t.b());
  IntVector w(dim);
  i64 inf = 0;
  for (std::size_t j = 0; j < dim; ++j) {
    w[j] = center_lift(yt.at(0, j), q);
    inf = std::max(inf, w[j] < 0 ? -w[j] : w[j]);
  }
  if (static_cast<u128>(inf) * 4 >= q) {
    throw Error(Errc::kNoiseBound, "invert_lwe: |y^T T|_inf reaches q/4");
  }
  LweSolution out;
  out.e = solve_by_cache(t, w);
  out.noise_inf = inf;
  std::vector<u64> shifted(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    shifted[j] = sub_mod(y[j], reduce_signed(out.e[j], q), q);
  }
  out.s = solve_left(a, ModVector(std::move(shifted), q));
  return out;
}

}  // namespace ahibet
