// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#include "laytoken/autograd.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>

#include <Eigen/Core>

#include "laytoken/error.hpp"
#include "laytoken/rope.hpp"

namespace laytoken::nn {

namespace {
using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMajor>;
using ConstMatrixMap = Eigen::Map<const RowMajor>;
Eigen::Index to_index(std::size_t v) { return static_cast<Eigen::Index>(v); }
}  // namespace

const Tensor& Var::value() const { return tape->value(index); }

Var Tape::constant(Tensor value) {
  Node n;
  n.owned = std::move(value);
  nodes_.push_back(std::move(n));
  return {this, nodes_.size() - 1};
}

Var Tape::parameter(Parameter& p) {
  if (auto it = params_.find(&p); it != params_.end()) return {this, it->second};
  Node n;
  n.view = &p.value;
  n.requires_grad = record_;
  n.param = record_ ? &p : nullptr;
  nodes_.push_back(std::move(n));
  params_.emplace(&p, nodes_.size() - 1);
  return {this, nodes_.size() - 1};
}

Var Tape::parameter(const Parameter& p) {
  if (auto it = params_.find(&p); it != params_.end()) return {this, it->second};
  Node n;
  n.view = &p.value;
  nodes_.push_back(std::move(n));
  params_.emplace(&p, nodes_.size() - 1);
  return {this, nodes_.size() - 1};
}

const Tensor& Tape::value(std::size_t i) const {
  const Node& n = nodes_[i];
  return n.view ? *n.view : n.owned;
}

Tensor& Tape::grad(std::size_t i) {
  Node& n = nodes_[i];
  if (n.grad.empty()) n.grad = Tensor(value(i).shape());
  return n.grad;
}

Var Tape::push(Tensor value, bool requires_grad, Backward backward) {
  Node n;
  n.owned = std::move(value);
  n.requires_grad = record_ && requires_grad;
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return {this, nodes_.size() - 1};
}

void Tape::backward(Var root) {
  if (!record_) throw ArgumentError("backward() on a non-recording tape");
  if (value(root.index).size() != 1) throw ArgumentError("backward() needs a scalar root");
  if (!nodes_[root.index].requires_grad) return;
  grad(root.index)[0] += 1.0;
  for (std::size_t i = root.index + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.grad.empty()) continue;
    if (n.backward) n.backward(*this, i);
    if (n.param) {
      auto& dst = n.param->grad;
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += n.grad[k];
    }
  }
}

// ---------------------------------------------------------------------------
namespace kernels {

void linear_forward(const double* x, std::size_t m, std::size_t k, const double* w, std::size_t n,
                    const double* bias, double* out) {
  MatrixMap o(out, to_index(m), to_index(n));
  o.noalias() = ConstMatrixMap(x, to_index(m), to_index(k)) * ConstMatrixMap(w, to_index(k), to_index(n));
  if (bias) o.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(bias, to_index(n));
}

double cross_entropy_row(std::span<const double> logits, std::size_t target) {
  double mx = logits[0];
  for (double v : logits) mx = std::max(mx, v);
  double sum = 0.0;
  for (double v : logits) sum += std::exp(v - mx);
  return mx + std::log(sum) - logits[target];
}

void softmax(std::span<const double> x, std::span<double> out) {
  double mx = x[0];
  for (double v : x) mx = std::max(mx, v);
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = std::exp(x[i] - mx);
    sum += out[i];
  }
  const double inv = 1.0 / sum;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] *= inv;
}

}  // namespace kernels

namespace {

Tape& same_tape(Var a, Var b) {
  if (a.tape != b.tape || a.tape == nullptr) throw ArgumentError("operands live on different tapes");
  return *a.tape;
}

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
  throw ArgumentError(std::string(op) + ": incompatible shapes " + shape_string(a.shape()) + " and " +
                      shape_string(b.shape()));
}

// dx[m x k] += dy[m x n] * w^T
void accumulate_dx(const double* dy, std::size_t m, std::size_t n, const double* w, std::size_t k,
                   double* dx) {
  MatrixMap(dx, to_index(m), to_index(k)).noalias() +=
      ConstMatrixMap(dy, to_index(m), to_index(n)) * ConstMatrixMap(w, to_index(k), to_index(n)).transpose();
}

// dw[k x n] += x^T * dy
void accumulate_dw(const double* x, std::size_t m, std::size_t k, const double* dy, std::size_t n,
                   double* dw) {
  MatrixMap(dw, to_index(k), to_index(n)).noalias() +=
      ConstMatrixMap(x, to_index(m), to_index(k)).transpose() * ConstMatrixMap(dy, to_index(m), to_index(n));
}

Var linear_impl(Var x, Var w, const Var* bias) {
  Tape& t = same_tape(x, w);
  const Tensor& X = x.value();
  const Tensor& W = w.value();
  const std::size_t m = X.rows(), k = X.cols(), n = W.cols();
  if (W.rows() != k) shape_error("linear", X, W);
  if (bias && bias->value().size() != n) shape_error("linear bias", W, bias->value());
  Tensor out(m, n);
  kernels::linear_forward(X.data(), m, k, W.data(), n, bias ? bias->value().data() : nullptr, out.data());
  const bool rg = t.requires_grad(x) || t.requires_grad(w) || (bias && t.requires_grad(*bias));
  const std::size_t xi = x.index, wi = w.index;
  const std::size_t bi = bias ? bias->index : 0;
  const bool has_bias = bias != nullptr;
  return t.push(std::move(out), rg, [xi, wi, bi, has_bias, m, k, n](Tape& tp, std::size_t self) {
    const Tensor& dy = tp.grad(self);
    if (tp.requires_grad(xi))
      accumulate_dx(dy.data(), m, n, tp.value(wi).data(), k, tp.grad(xi).data());
    if (tp.requires_grad(wi))
      accumulate_dw(tp.value(xi).data(), m, k, dy.data(), n, tp.grad(wi).data());
    if (has_bias && tp.requires_grad(bi)) {
      double* db = tp.grad(bi).data();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) db[j] += dy[i * n + j];
    }
  });
}

}  // namespace

Var matmul(Var a, Var b) { return linear_impl(a, b, nullptr); }
Var linear(Var x, Var w, Var bias) { return linear_impl(x, w, &bias); }
Var linear(Var x, Var w) { return linear_impl(x, w, nullptr); }

Var add(Var a, Var b) {
  Tape& t = same_tape(a, b);
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  if (A.size() != B.size()) shape_error("add", A, B);
  Tensor out = A;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += B[i];
  const std::size_t ai = a.index, bi = b.index;
  return t.push(std::move(out), t.requires_grad(a) || t.requires_grad(b), [ai, bi](Tape& tp, std::size_t self) {
    const Tensor& g = tp.grad(self);
    for (std::size_t src : {ai, bi}) {
      if (!tp.requires_grad(src)) continue;
      Tensor& d = tp.grad(src);
      for (std::size_t i = 0; i < d.size(); ++i) d[i] += g[i];
    }
  });
}

Var scale(Var a, double factor) {
  Tape& t = *a.tape;
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= factor;
  const std::size_t ai = a.index;
  return t.push(std::move(out), t.requires_grad(a), [ai, factor](Tape& tp, std::size_t self) {
    const Tensor& g = tp.grad(self);
    Tensor& d = tp.grad(ai);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += factor * g[i];
  });
}

Var add_cyclic_rows(Var x, Var table) {
  Tape& t = same_tape(x, table);
  const Tensor& X = x.value();
  const Tensor& T = table.value();
  if (X.cols() != T.cols() || T.rows() == 0) shape_error("add_cyclic_rows", X, T);
  const std::size_t rows = X.rows(), cols = X.cols(), period = T.rows();
  Tensor out = X;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) out.at(r, c) += T.at(r % period, c);
  const std::size_t xi = x.index, ti = table.index;
  return t.push(std::move(out), t.requires_grad(x) || t.requires_grad(table),
                [xi, ti, rows, cols, period](Tape& tp, std::size_t self) {
                  const Tensor& g = tp.grad(self);
                  if (tp.requires_grad(xi)) {
                    Tensor& d = tp.grad(xi);
                    for (std::size_t i = 0; i < d.size(); ++i) d[i] += g[i];
                  }
                  if (tp.requires_grad(ti)) {
                    Tensor& d = tp.grad(ti);
                    for (std::size_t r = 0; r < rows; ++r)
                      for (std::size_t c = 0; c < cols; ++c) d.at(r % period, c) += g.at(r, c);
                  }
                });
}

Var mul_cyclic_rows(Var x, Var table) {
  Tape& t = same_tape(x, table);
  const Tensor& X = x.value();
  const Tensor& T = table.value();
  if (X.cols() != T.cols() || T.rows() == 0) shape_error("mul_cyclic_rows", X, T);
  const std::size_t rows = X.rows(), cols = X.cols(), period = T.rows();
  Tensor out = X;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) out.at(r, c) *= T.at(r % period, c);
  const std::size_t xi = x.index, ti = table.index;
  return t.push(std::move(out), t.requires_grad(x) || t.requires_grad(table),
                [xi, ti, rows, cols, period](Tape& tp, std::size_t self) {
                  const Tensor& g = tp.grad(self);
                  if (tp.requires_grad(xi)) {
                    const Tensor& tv = tp.value(ti);
                    Tensor& d = tp.grad(xi);
                    for (std::size_t r = 0; r < rows; ++r)
                      for (std::size_t c = 0; c < cols; ++c) d.at(r, c) += g.at(r, c) * tv.at(r % period, c);
                  }
                  if (tp.requires_grad(ti)) {
                    const Tensor& xv = tp.value(xi);
                    Tensor& d = tp.grad(ti);
                    for (std::size_t r = 0; r < rows; ++r)
                      for (std::size_t c = 0; c < cols; ++c) d.at(r % period, c) += g.at(r, c) * xv.at(r, c);
                  }
                });
}

Var layer_norm(Var x, Var gamma, Var beta, double eps) {
  Tape& t = same_tape(x, gamma);
  const Tensor& X = x.value();
  const std::size_t rows = X.rows(), cols = X.cols();
  if (gamma.value().size() != cols || beta.value().size() != cols)
    shape_error("layer_norm", X, gamma.value());
  const double* g = gamma.value().data();
  const double* b = beta.value().data();
  auto xhat = std::make_shared<Tensor>(rows, cols);
  auto rstd = std::make_shared<std::vector<double>>(rows);
  Tensor out(rows, cols);
  const double inv_n = 1.0 / static_cast<double>(cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto xr = X.row(r);
    double mean = 0.0;
    for (double v : xr) mean += v;
    mean *= inv_n;
    double var = 0.0;
    for (double v : xr) var += (v - mean) * (v - mean);
    var *= inv_n;
    const double rs = 1.0 / std::sqrt(var + eps);
    (*rstd)[r] = rs;
    for (std::size_t c = 0; c < cols; ++c) {
      const double h = (xr[c] - mean) * rs;
      xhat->at(r, c) = h;
      out.at(r, c) = h * g[c] + b[c];
    }
  }
  const std::size_t xi = x.index, gi = gamma.index, bi = beta.index;
  const bool rg = t.requires_grad(x) || t.requires_grad(gamma) || t.requires_grad(beta);
  return t.push(std::move(out), rg, [=](Tape& tp, std::size_t self) {
    const Tensor& dy = tp.grad(self);
    const double* gm = tp.value(gi).data();
    if (tp.requires_grad(gi) || tp.requires_grad(bi)) {
      double* dg = tp.requires_grad(gi) ? tp.grad(gi).data() : nullptr;
      double* db = tp.requires_grad(bi) ? tp.grad(bi).data() : nullptr;
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
          if (dg) dg[c] += dy.at(r, c) * xhat->at(r, c);
          if (db) db[c] += dy.at(r, c);
        }
    }
    if (!tp.requires_grad(xi)) return;
    Tensor& dx = tp.grad(xi);
    for (std::size_t r = 0; r < rows; ++r) {
      double mean_dh = 0.0, mean_dh_h = 0.0;
      for (std::size_t c = 0; c < cols; ++c) {
        const double dh = dy.at(r, c) * gm[c];
        mean_dh += dh;
        mean_dh_h += dh * xhat->at(r, c);
      }
      mean_dh *= inv_n;
      mean_dh_h *= inv_n;
      for (std::size_t c = 0; c < cols; ++c) {
        const double dh = dy.at(r, c) * gm[c];
        dx.at(r, c) += (*rstd)[r] * (dh - mean_dh - xhat->at(r, c) * mean_dh_h);
      }
    }
  });
}

Var gelu(Var x) {
  Tape& t = *x.tape;
  constexpr double kAlpha = 0.044715;
  const double k = std::sqrt(2.0 / std::numbers::pi);
  Tensor out = x.value();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double v = out[i];
    out[i] = 0.5 * v * (1.0 + std::tanh(k * (v + kAlpha * v * v * v)));
  }
  const std::size_t xi = x.index;
  return t.push(std::move(out), t.requires_grad(x), [xi, k](Tape& tp, std::size_t self) {
    const Tensor& g = tp.grad(self);
    const Tensor& X = tp.value(xi);
    Tensor& d = tp.grad(xi);
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double v = X[i];
      const double th = std::tanh(k * (v + kAlpha * v * v * v));
      const double dv = 0.5 * (1.0 + th) + 0.5 * v * (1.0 - th * th) * k * (1.0 + 3.0 * kAlpha * v * v);
      d[i] += g[i] * dv;
    }
  });
}

Var sigmoid(Var x) {
  Tape& t = *x.tape;
  Tensor out = x.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-out[i]));
  const std::size_t xi = x.index;
  return t.push(std::move(out), t.requires_grad(x), [xi](Tape& tp, std::size_t self) {
    const Tensor& g = tp.grad(self);
    const Tensor& y = tp.value(self);
    Tensor& d = tp.grad(xi);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += g[i] * y[i] * (1.0 - y[i]);
  });
}

Var gather_rows(Var x, std::vector<std::size_t> rows) {
  Tape& t = *x.tape;
  const Tensor& X = x.value();
  const std::size_t cols = X.cols();
  Tensor out(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= X.rows()) throw ArgumentError("gather_rows: row index out of range");
    std::copy_n(X.row(rows[r]).data(), cols, out.row(r).data());
  }
  const std::size_t xi = x.index;
  return t.push(std::move(out), t.requires_grad(x),
                [xi, cols, rows = std::move(rows)](Tape& tp, std::size_t self) {
                  const Tensor& g = tp.grad(self);
                  Tensor& d = tp.grad(xi);
                  for (std::size_t r = 0; r < rows.size(); ++r)
                    for (std::size_t c = 0; c < cols; ++c) d.at(rows[r], c) += g.at(r, c);
                });
}

Var assemble_rows(const std::vector<std::pair<Var, std::vector<std::size_t>>>& parts,
                  std::size_t total_rows) {
  if (parts.empty()) throw ArgumentError("assemble_rows: no parts");
  Tape& t = *parts.front().first.tape;
  const std::size_t cols = parts.front().first.value().cols();
  Tensor out(total_rows, cols);
  std::vector<char> covered(total_rows, 0);
  bool rg = false;
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> routes;
  for (const auto& [v, dst] : parts) {
    const Tensor& src = v.value();
    if (src.cols() != cols || src.rows() != dst.size())
      throw ArgumentError("assemble_rows: part shape does not match its destination rows");
    for (std::size_t r = 0; r < dst.size(); ++r) {
      if (dst[r] >= total_rows || covered[dst[r]])
        throw ArgumentError("assemble_rows: destination rows must be distinct and in range");
      covered[dst[r]] = 1;
      std::copy_n(src.row(r).data(), cols, out.row(dst[r]).data());
    }
    rg = rg || t.requires_grad(v);
    routes.emplace_back(v.index, dst);
  }
  if (std::find(covered.begin(), covered.end(), 0) != covered.end())
    throw ArgumentError("assemble_rows: some destination rows are not covered");
  return t.push(std::move(out), rg, [cols, routes = std::move(routes)](Tape& tp, std::size_t self) {
    const Tensor& g = tp.grad(self);
    for (const auto& [src, dst] : routes) {
      if (!tp.requires_grad(src)) continue;
      Tensor& d = tp.grad(src);
      for (std::size_t r = 0; r < dst.size(); ++r)
        for (std::size_t c = 0; c < cols; ++c) d.at(r, c) += g.at(dst[r], c);
    }
  });
}

Var causal_self_attention(Var qkv, std::span<const std::int64_t> positions, std::size_t n_heads,
                          double rope_base) {
  Tape& t = *qkv.tape;
  const Tensor& X = qkv.value();
  const std::size_t S = X.rows();
  if (X.cols() % 3 != 0 || n_heads == 0 || (X.cols() / 3) % n_heads != 0)
    throw ArgumentError("causal_self_attention: width must be 3 * d with d divisible by heads");
  if (positions.size() != S) throw ArgumentError("causal_self_attention: one position id per row required");
  const std::size_t d = X.cols() / 3;
  const std::size_t hd = d / n_heads;
  const auto inv = rope_inverse_frequencies(hd, rope_base);
  const double sc = 1.0 / std::sqrt(static_cast<double>(hd));

  // Rotation table per row: cos/sin of position * inv_freq[k].
  auto cosv = std::make_shared<std::vector<double>>(S * inv.size());
  auto sinv = std::make_shared<std::vector<double>>(S * inv.size());
  for (std::size_t i = 0; i < S; ++i)
    for (std::size_t k = 0; k < inv.size(); ++k) {
      const double a = static_cast<double>(positions[i]) * inv[k];
      (*cosv)[i * inv.size() + k] = std::cos(a);
      (*sinv)[i * inv.size() + k] = std::sin(a);
    }
  const std::size_t half = inv.size();
  auto rotate = [&, half](const double* src, double* dst, std::size_t row, bool inverse) {
    const double* cs = cosv->data() + row * half;
    const double* sn = sinv->data() + row * half;
    const double sgn = inverse ? -1.0 : 1.0;
    for (std::size_t h = 0; h < n_heads; ++h)
      for (std::size_t k = 0; k < half; ++k) {
        const std::size_t c = h * hd + 2 * k;
        const double x0 = src[c], x1 = src[c + 1];
        dst[c] = x0 * cs[k] - sgn * x1 * sn[k];
        dst[c + 1] = sgn * x0 * sn[k] + x1 * cs[k];
      }
  };

  auto q = std::make_shared<Tensor>(S, d);
  auto k = std::make_shared<Tensor>(S, d);
  for (std::size_t i = 0; i < S; ++i) {
    const double* row = X.row(i).data();
    rotate(row, q->row(i).data(), i, false);
    rotate(row + d, k->row(i).data(), i, false);
  }
  auto probs = std::make_shared<std::vector<double>>(n_heads * S * S, 0.0);
  Tensor out(S, d);
  std::vector<double> scores(S);
  for (std::size_t h = 0; h < n_heads; ++h) {
    const std::size_t off = h * hd;
    for (std::size_t i = 0; i < S; ++i) {
      const double* qi = q->row(i).data() + off;
      for (std::size_t j = 0; j <= i; ++j) {
        const double* kj = k->row(j).data() + off;
        double s = 0.0;
        for (std::size_t c = 0; c < hd; ++c) s += qi[c] * kj[c];
        scores[j] = s * sc;
      }
      double* p = probs->data() + (h * S + i) * S;
      kernels::softmax({scores.data(), i + 1}, {p, i + 1});
      double* o = out.row(i).data() + off;
      for (std::size_t j = 0; j <= i; ++j) {
        const double* vj = X.row(j).data() + 2 * d + off;
        const double pj = p[j];
        for (std::size_t c = 0; c < hd; ++c) o[c] += pj * vj[c];
      }
    }
  }

  const std::size_t xi = qkv.index;
  return t.push(std::move(out), t.requires_grad(qkv),
                [=](Tape& tp, std::size_t self) {
                  const Tensor& dO = tp.grad(self);
                  const Tensor& Xv = tp.value(xi);
                  Tensor dq(S, d), dk(S, d);
                  Tensor& dX = tp.grad(xi);
                  std::vector<double> dp(S);
                  for (std::size_t h = 0; h < n_heads; ++h) {
                    const std::size_t off = h * hd;
                    for (std::size_t i = 0; i < S; ++i) {
                      const double* p = probs->data() + (h * S + i) * S;
                      const double* go = dO.row(i).data() + off;
                      double dot = 0.0;
                      for (std::size_t j = 0; j <= i; ++j) {
                        const double* vj = Xv.row(j).data() + 2 * d + off;
                        double* dvj = dX.row(j).data() + 2 * d + off;
                        double acc = 0.0;
                        for (std::size_t c = 0; c < hd; ++c) {
                          acc += go[c] * vj[c];
                          dvj[c] += p[j] * go[c];
                        }
                        dp[j] = acc;
                        dot += p[j] * acc;
                      }
                      const double* qi = q->row(i).data() + off;
                      double* dqi = dq.row(i).data() + off;
                      for (std::size_t j = 0; j <= i; ++j) {
                        const double ds = p[j] * (dp[j] - dot) * sc;
                        if (ds == 0.0) continue;
                        const double* kj = k->row(j).data() + off;
                        double* dkj = dk.row(j).data() + off;
                        for (std::size_t c = 0; c < hd; ++c) {
                          dqi[c] += ds * kj[c];
                          dkj[c] += ds * qi[c];
                        }
                      }
                    }
                  }
                  // Undo the rotation: R(theta)^T = R(-theta).
                  const std::size_t hf = half;
                  for (std::size_t i = 0; i < S; ++i) {
                    const double* cs = cosv->data() + i * hf;
                    const double* sn = sinv->data() + i * hf;
                    double* dxq = dX.row(i).data();
                    double* dxk = dxq + d;
                    const double* gq = dq.row(i).data();
                    const double* gk = dk.row(i).data();
                    for (std::size_t h = 0; h < n_heads; ++h)
                      for (std::size_t kk = 0; kk < hf; ++kk) {
                        const std::size_t c = h * hd + 2 * kk;
                        dxq[c] += gq[c] * cs[kk] + gq[c + 1] * sn[kk];
                        dxq[c + 1] += -gq[c] * sn[kk] + gq[c + 1] * cs[kk];
                        dxk[c] += gk[c] * cs[kk] + gk[c + 1] * sn[kk];
                        dxk[c + 1] += -gk[c] * sn[kk] + gk[c + 1] * cs[kk];
                      }
                  }
                });
}

Var pooled_attention(Var query, Var keys, Var values, std::size_t group) {
  Tape& t = same_tape(query, keys);
  const Tensor& Q = query.value();
  const Tensor& K = keys.value();
  const Tensor& V = values.value();
  const std::size_t d = Q.cols();
  if (Q.rows() != 1 || K.cols() != d || V.cols() != d || K.rows() != V.rows() || group == 0 ||
      K.rows() % group != 0)
    shape_error("pooled_attention", Q, K);
  const std::size_t n = K.rows() / group;
  const double sc = 1.0 / std::sqrt(static_cast<double>(d));
  auto weights = std::make_shared<std::vector<double>>(n * group);
  Tensor out(n, d);
  std::vector<double> s(group);
  for (std::size_t g = 0; g < n; ++g) {
    for (std::size_t c = 0; c < group; ++c) {
      const double* kr = K.row(g * group + c).data();
      double acc = 0.0;
      for (std::size_t j = 0; j < d; ++j) acc += Q[j] * kr[j];
      s[c] = acc * sc;
    }
    double* a = weights->data() + g * group;
    kernels::softmax(s, {a, group});
    double* o = out.row(g).data();
    for (std::size_t c = 0; c < group; ++c) {
      const double* vr = V.row(g * group + c).data();
      for (std::size_t j = 0; j < d; ++j) o[j] += a[c] * vr[j];
    }
  }
  const std::size_t qi = query.index, ki = keys.index, vi = values.index;
  const bool rg = t.requires_grad(query) || t.requires_grad(keys) || t.requires_grad(values);
  return t.push(std::move(out), rg, [=](Tape& tp, std::size_t self) {
    const Tensor& dO = tp.grad(self);
    const Tensor& Qv = tp.value(qi);
    const Tensor& Kv = tp.value(ki);
    const Tensor& Vv = tp.value(vi);
    double* dq = tp.requires_grad(qi) ? tp.grad(qi).data() : nullptr;
    double* dk = tp.requires_grad(ki) ? tp.grad(ki).data() : nullptr;
    double* dv = tp.requires_grad(vi) ? tp.grad(vi).data() : nullptr;
    std::vector<double> da(group);
    for (std::size_t g = 0; g < n; ++g) {
      const double* a = weights->data() + g * group;
      const double* go = dO.row(g).data();
      double dot = 0.0;
      for (std::size_t c = 0; c < group; ++c) {
        const double* vr = Vv.row(g * group + c).data();
        double acc = 0.0;
        for (std::size_t j = 0; j < d; ++j) acc += go[j] * vr[j];
        da[c] = acc;
        dot += a[c] * acc;
        if (dv) {
          double* dvr = dv + (g * group + c) * d;
          for (std::size_t j = 0; j < d; ++j) dvr[j] += a[c] * go[j];
        }
      }
      for (std::size_t c = 0; c < group; ++c) {
        const double ds = a[c] * (da[c] - dot) * sc;
        const double* kr = Kv.row(g * group + c).data();
        if (dq)
          for (std::size_t j = 0; j < d; ++j) dq[j] += ds * kr[j];
        if (dk) {
          double* dkr = dk + (g * group + c) * d;
          for (std::size_t j = 0; j < d; ++j) dkr[j] += ds * Qv[j];
        }
      }
    }
  });
}

Var cross_entropy_sum(Var logits, std::vector<std::size_t> targets) {
  Tape& t = *logits.tape;
  const Tensor& L = logits.value();
  if (targets.size() != L.rows()) throw ArgumentError("cross_entropy_sum: one target per row required");
  double total = 0.0;
  for (std::size_t r = 0; r < L.rows(); ++r) {
    if (targets[r] >= L.cols()) throw ArgumentError("cross_entropy_sum: target id outside vocabulary");
    total += kernels::cross_entropy_row(L.row(r), targets[r]);
  }
  const std::size_t li = logits.index;
  return t.push(Tensor({1}, std::vector<double>{total}), t.requires_grad(logits),
                [li, targets = std::move(targets)](Tape& tp, std::size_t self) {
                  const double g = tp.grad(self)[0];
                  const Tensor& Lv = tp.value(li);
                  Tensor& d = tp.grad(li);
                  std::vector<double> p(Lv.cols());
                  for (std::size_t r = 0; r < Lv.rows(); ++r) {
                    kernels::softmax(Lv.row(r), p);
                    p[targets[r]] -= 1.0;
                    auto dr = d.row(r);
                    for (std::size_t c = 0; c < p.size(); ++c) dr[c] += g * p[c];
                  }
                });
}

Var mse_sum(Var pred, Tensor target) {
  Tape& t = *pred.tape;
  const Tensor& P = pred.value();
  if (P.size() != target.size()) shape_error("mse_sum", P, target);
  const std::size_t cols = P.cols();
  double total = 0.0;
  for (std::size_t r = 0; r < P.rows(); ++r) {
    double row = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      const double e = P.at(r, c) - target[r * cols + c];
      row += e * e;
    }
    total += row / static_cast<double>(cols);
  }
  const std::size_t pi = pred.index;
  return t.push(Tensor({1}, std::vector<double>{total}), t.requires_grad(pred),
                [pi, cols, target = std::move(target)](Tape& tp, std::size_t self) {
                  const double g = tp.grad(self)[0];
                  const Tensor& Pv = tp.value(pi);
                  Tensor& d = tp.grad(pi);
                  const double k = 2.0 / static_cast<double>(cols);
                  for (std::size_t i = 0; i < d.size(); ++i) d[i] += g * k * (Pv[i] - target[i]);
                });
}

Var sum_squares(Var x) {
  Tape& t = *x.tape;
  double total = 0.0;
  for (double v : x.value().values()) total += v * v;
  const std::size_t xi = x.index;
  return t.push(Tensor({1}, std::vector<double>{total}), t.requires_grad(x), [xi](Tape& tp, std::size_t self) {
    const double g = tp.grad(self)[0];
    const Tensor& X = tp.value(xi);
    Tensor& d = tp.grad(xi);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += 2.0 * g * X[i];
  });
}

}  // namespace laytoken::nn
