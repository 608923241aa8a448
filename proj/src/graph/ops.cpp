#include "catdist/graph/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "catdist/common/errors.hpp"

namespace catdist::graph {

namespace {

constexpr double kLogFloor = 1e-12;
constexpr double kSnapTolerance = 1e-9;

std::string shape_of(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

std::size_t broadcast_dim(std::size_t a, std::size_t b, const char* op) {
  if (a == b || b == 1) return a;
  if (a == 1) return b;
  throw ShapeMismatch(std::string(op) + ": dimensions " + std::to_string(a) + " and " +
                      std::to_string(b) + " do not broadcast");
}

double at_broadcast(const Matrix& m, std::size_t r, std::size_t c) {
  return m(m.rows() == 1 ? 0 : r, m.cols() == 1 ? 0 : c);
}

double& at_broadcast(Matrix& m, std::size_t r, std::size_t c) {
  return m(m.rows() == 1 ? 0 : r, m.cols() == 1 ? 0 : c);
}

double activate(Activation kind, double x) {
  switch (kind) {
    case Activation::relu:
      return x > 0.0 ? x : 0.0;
    case Activation::elu:
      return x > 0.0 ? x : std::expm1(x);
    case Activation::abs:
      return std::abs(x);
    case Activation::identity:
    case Activation::softmax:
      break;
  }
  return x;
}

double activate_slope(Activation kind, double x) {
  switch (kind) {
    case Activation::relu:
      return x > 0.0 ? 1.0 : 0.0;
    case Activation::elu:
      return x > 0.0 ? 1.0 : std::exp(x);
    case Activation::abs:
      return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
    case Activation::identity:
    case Activation::softmax:
      break;
  }
  return 1.0;
}

// Lower target index and fractional weight for one source atom. atom_slope is
// false where the atom gradient is defined as zero (clipped or on a target atom).
struct Split {
  std::size_t lower;
  double frac;
  bool atom_slope;
};

Split split_atom(double atom, const dist::SupportSpec& target) {
  const double lo = target.v_min();
  const double hi = target.v_max();
  const bool inside = atom > lo && atom < hi;
  double pos = (std::clamp(atom, lo, hi) - lo) / target.delta();
  const double nearest = std::round(pos);
  if (std::abs(pos - nearest) < kSnapTolerance) pos = nearest;
  const double lower = std::floor(pos);
  auto l = static_cast<std::size_t>(lower);
  double frac = pos - lower;
  if (l + 1 >= target.m()) {
    l = target.m() - 1;
    frac = 0.0;
  }
  return {l, frac, inside && frac > 0.0};
}

}  // namespace

Node dense(const Node& input, const Node& weights, const Node& bias) {
  const Matrix& x = input.value();
  const Matrix& w = weights.value();
  const Matrix& b = bias.value();
  if (x.cols() != w.rows() || b.rows() != 1 || b.cols() != w.cols()) {
    throw ShapeMismatch("dense: input " + shape_of(x) + ", weights " + shape_of(w) + ", bias " +
                        shape_of(b));
  }
  const std::size_t batch = x.rows();
  const std::size_t in = w.rows();
  const std::size_t out_dim = w.cols();
  Matrix out(batch, out_dim);
  for (std::size_t r = 0; r < batch; ++r) {
    auto out_row = out.row(r);
    std::copy(b.data().begin(), b.data().end(), out_row.begin());
    for (std::size_t k = 0; k < in; ++k) {
      const double xv = x(r, k);
      if (xv == 0.0) continue;
      const auto w_row = w.row(k);
      for (std::size_t c = 0; c < out_dim; ++c) out_row[c] += xv * w_row[c];
    }
  }
  return make_node("dense", std::move(out), {input, weights, bias}, [](NodeData& self) {
    NodeData& xin = *self.parents[0];
    NodeData& win = *self.parents[1];
    NodeData& bin = *self.parents[2];
    const Matrix& g = self.grad;
    const std::size_t batch = g.rows();
    const std::size_t out_dim = g.cols();
    const std::size_t in = win.value.rows();
    if (xin.requires_grad) {
      for (std::size_t r = 0; r < batch; ++r) {
        const auto g_row = g.row(r);
        for (std::size_t k = 0; k < in; ++k) {
          const auto w_row = win.value.row(k);
          double acc = 0.0;
          for (std::size_t c = 0; c < out_dim; ++c) acc += g_row[c] * w_row[c];
          xin.grad(r, k) += acc;
        }
      }
    }
    if (win.requires_grad) {
      for (std::size_t r = 0; r < batch; ++r) {
        const auto g_row = g.row(r);
        for (std::size_t k = 0; k < in; ++k) {
          const double xv = xin.value(r, k);
          if (xv == 0.0) continue;
          auto gw_row = win.grad.row(k);
          for (std::size_t c = 0; c < out_dim; ++c) gw_row[c] += xv * g_row[c];
        }
      }
    }
    if (bin.requires_grad) {
      for (std::size_t r = 0; r < batch; ++r) {
        for (std::size_t c = 0; c < out_dim; ++c) bin.grad(0, c) += g(r, c);
      }
    }
  });
}

Node activation(const Node& input, Activation kind) {
  const Matrix& x = input.value();
  Matrix out(x.rows(), x.cols());
  if (kind == Activation::softmax) {
    for (std::size_t r = 0; r < x.rows(); ++r) {
      const auto in_row = x.row(r);
      auto out_row = out.row(r);
      const double peak = *std::max_element(in_row.begin(), in_row.end());
      double total = 0.0;
      for (std::size_t c = 0; c < in_row.size(); ++c) {
        out_row[c] = std::exp(in_row[c] - peak);
        total += out_row[c];
      }
      for (double& v : out_row) v /= total;
    }
    return make_node("softmax", std::move(out), {input}, [](NodeData& self) {
      NodeData& in = *self.parents[0];
      for (std::size_t r = 0; r < self.value.rows(); ++r) {
        const auto y = self.value.row(r);
        const auto g = self.grad.row(r);
        double dot = 0.0;
        for (std::size_t c = 0; c < y.size(); ++c) dot += g[c] * y[c];
        for (std::size_t c = 0; c < y.size(); ++c) in.grad(r, c) += y[c] * (g[c] - dot);
      }
    });
  }
  for (std::size_t i = 0; i < x.size(); ++i) out.data()[i] = activate(kind, x.data()[i]);
  return make_node("activation", std::move(out), {input}, [kind](NodeData& self) {
    NodeData& in = *self.parents[0];
    const auto xs = in.value.data();
    const auto g = self.grad.data();
    auto gi = in.grad.data();
    for (std::size_t i = 0; i < xs.size(); ++i) gi[i] += g[i] * activate_slope(kind, xs[i]);
  });
}

Node add(const Node& a, const Node& b) {
  const Matrix& x = a.value();
  const Matrix& y = b.value();
  const std::size_t rows = broadcast_dim(x.rows(), y.rows(), "add");
  const std::size_t cols = broadcast_dim(x.cols(), y.cols(), "add");
  Matrix out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out(r, c) = at_broadcast(x, r, c) + at_broadcast(y, r, c);
  }
  return make_node("add", std::move(out), {a, b}, [](NodeData& self) {
    for (std::size_t side = 0; side < 2; ++side) {
      NodeData& p = *self.parents[side];
      if (!p.requires_grad) continue;
      for (std::size_t r = 0; r < self.grad.rows(); ++r) {
        for (std::size_t c = 0; c < self.grad.cols(); ++c) at_broadcast(p.grad, r, c) += self.grad(r, c);
      }
    }
  });
}

Node mul(const Node& a, const Node& b) {
  const Matrix& x = a.value();
  const Matrix& y = b.value();
  const std::size_t rows = broadcast_dim(x.rows(), y.rows(), "mul");
  const std::size_t cols = broadcast_dim(x.cols(), y.cols(), "mul");
  Matrix out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out(r, c) = at_broadcast(x, r, c) * at_broadcast(y, r, c);
  }
  return make_node("mul", std::move(out), {a, b}, [](NodeData& self) {
    NodeData& pa = *self.parents[0];
    NodeData& pb = *self.parents[1];
    for (std::size_t r = 0; r < self.grad.rows(); ++r) {
      for (std::size_t c = 0; c < self.grad.cols(); ++c) {
        const double g = self.grad(r, c);
        if (pa.requires_grad) at_broadcast(pa.grad, r, c) += g * at_broadcast(pb.value, r, c);
        if (pb.requires_grad) at_broadcast(pb.grad, r, c) += g * at_broadcast(pa.value, r, c);
      }
    }
  });
}

Node scale(const Node& a, double factor) {
  Matrix out = a.value();
  for (double& v : out.data()) v *= factor;
  return make_node("scale", std::move(out), {a}, [factor](NodeData& self) {
    auto gi = self.parents[0]->grad.data();
    const auto g = self.grad.data();
    for (std::size_t i = 0; i < g.size(); ++i) gi[i] += factor * g[i];
  });
}

Node mean_all(const Node& a) {
  const auto values = a.value().data();
  if (values.empty()) throw ShapeMismatch("mean_all of an empty node");
  double total = 0.0;
  for (double v : values) total += v;
  const double inv = 1.0 / static_cast<double>(values.size());
  return make_node("mean_all", Matrix(1, 1, total * inv), {a}, [inv](NodeData& self) {
    const double g = self.grad(0, 0) * inv;
    for (double& v : self.parents[0]->grad.data()) v += g;
  });
}

Node slice_cols(const Node& input, std::size_t start, std::size_t count) {
  const Matrix& x = input.value();
  if (start + count > x.cols()) throw ShapeMismatch("slice_cols out of range");
  Matrix out(x.rows(), count);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < count; ++c) out(r, c) = x(r, start + c);
  }
  return make_node("slice_cols", std::move(out), {input}, [start](NodeData& self) {
    NodeData& in = *self.parents[0];
    for (std::size_t r = 0; r < self.grad.rows(); ++r) {
      for (std::size_t c = 0; c < self.grad.cols(); ++c) in.grad(r, start + c) += self.grad(r, c);
    }
  });
}

Node slice_rows(const Node& input, std::size_t start, std::size_t count) {
  const Matrix& x = input.value();
  if (start + count > x.rows()) throw ShapeMismatch("slice_rows out of range");
  Matrix out(count, x.cols());
  std::copy_n(x.data().begin() + static_cast<std::ptrdiff_t>(start * x.cols()), count * x.cols(),
              out.data().begin());
  return make_node("slice_rows", std::move(out), {input}, [start](NodeData& self) {
    auto gi = self.parents[0]->grad.data();
    const auto g = self.grad.data();
    const std::size_t offset = start * self.grad.cols();
    for (std::size_t i = 0; i < g.size(); ++i) gi[offset + i] += g[i];
  });
}

Node select_blocks(const Node& input, std::span<const std::size_t> indices, std::size_t block) {
  const Matrix& x = input.value();
  if (indices.size() != x.rows()) throw ShapeMismatch("select_blocks: one index per row required");
  Matrix out(x.rows(), block);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    if ((indices[r] + 1) * block > x.cols()) throw ShapeMismatch("select_blocks index out of range");
    for (std::size_t c = 0; c < block; ++c) out(r, c) = x(r, indices[r] * block + c);
  }
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  return make_node("select_blocks", std::move(out), {input},
                   [idx = std::move(idx), block](NodeData& self) {
                     NodeData& in = *self.parents[0];
                     for (std::size_t r = 0; r < self.grad.rows(); ++r) {
                       for (std::size_t c = 0; c < block; ++c) {
                         in.grad(r, idx[r] * block + c) += self.grad(r, c);
                       }
                     }
                   });
}

Node concat_rows(std::span<const Node> parts) {
  if (parts.empty()) throw ShapeMismatch("concat_rows of nothing");
  const std::size_t cols = parts.front().cols();
  std::size_t rows = 0;
  for (const auto& p : parts) {
    if (p.cols() != cols) throw ShapeMismatch("concat_rows: column counts differ");
    rows += p.rows();
  }
  Matrix out(rows, cols);
  std::size_t offset = 0;
  for (const auto& p : parts) {
    std::copy(p.value().data().begin(), p.value().data().end(), out.data().begin() + offset);
    offset += p.value().size();
  }
  return make_node("concat_rows", std::move(out), {parts.begin(), parts.end()}, [](NodeData& self) {
    std::size_t offset = 0;
    const auto g = self.grad.data();
    for (auto& parent : self.parents) {
      const std::size_t n = parent->value.size();
      if (parent->requires_grad) {
        auto gp = parent->grad.data();
        for (std::size_t i = 0; i < n; ++i) gp[i] += g[offset + i];
      }
      offset += n;
    }
  });
}

Node project(const Node& probs, const Node& atoms, const dist::SupportSpec& target) {
  const Matrix& p = probs.value();
  const Matrix& a = atoms.value();
  if (a.cols() != p.cols() || (a.rows() != p.rows() && a.rows() != 1)) {
    throw ShapeMismatch("project: probs " + shape_of(p) + " vs atoms " + shape_of(a));
  }
  const std::size_t k_atoms = target.m();
  Matrix out(p.rows(), k_atoms);
  for (std::size_t r = 0; r < p.rows(); ++r) {
    const std::size_t ar = a.rows() == 1 ? 0 : r;
    for (std::size_t j = 0; j < p.cols(); ++j) {
      const double mass = p(r, j);
      if (mass == 0.0) continue;
      const Split s = split_atom(a(ar, j), target);
      out(r, s.lower) += (1.0 - s.frac) * mass;
      if (s.frac > 0.0) out(r, s.lower + 1) += s.frac * mass;
    }
  }
  return make_node("project", std::move(out), {probs, atoms}, [target](NodeData& self) {
    NodeData& pn = *self.parents[0];
    NodeData& an = *self.parents[1];
    const Matrix& g = self.grad;
    const double inv_step = 1.0 / target.delta();
    const bool shared_atoms = an.value.rows() == 1;
    for (std::size_t r = 0; r < pn.value.rows(); ++r) {
      const std::size_t ar = shared_atoms ? 0 : r;
      for (std::size_t j = 0; j < pn.value.cols(); ++j) {
        const Split s = split_atom(an.value(ar, j), target);
        const double g_lo = g(r, s.lower);
        const double g_hi = s.frac > 0.0 ? g(r, s.lower + 1) : 0.0;
        if (pn.requires_grad) pn.grad(r, j) += (1.0 - s.frac) * g_lo + s.frac * g_hi;
        if (an.requires_grad && s.atom_slope) {
          an.grad(ar, j) += pn.value(r, j) * (g_hi - g_lo) * inv_step;
        }
      }
    }
  });
}

Node convolve(const Node& p1, const Node& p2) {
  const Matrix& x = p1.value();
  const Matrix& y = p2.value();
  if (x.rows() != y.rows()) throw ShapeMismatch("convolve: row counts differ");
  const std::size_t n1 = x.cols();
  const std::size_t n2 = y.cols();
  Matrix out(x.rows(), n1 + n2 - 1);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto xr = x.row(r);
    const auto yr = y.row(r);
    auto o = out.row(r);
    for (std::size_t i = 0; i < n1; ++i) {
      const double xi = xr[i];
      if (xi == 0.0) continue;
      for (std::size_t k = 0; k < n2; ++k) o[i + k] += xi * yr[k];
    }
  }
  return make_node("convolve", std::move(out), {p1, p2}, [](NodeData& self) {
    NodeData& a = *self.parents[0];
    NodeData& b = *self.parents[1];
    const std::size_t n1 = a.value.cols();
    const std::size_t n2 = b.value.cols();
    for (std::size_t r = 0; r < self.grad.rows(); ++r) {
      const auto g = self.grad.row(r);
      if (a.requires_grad) {
        const auto br = b.value.row(r);
        auto ga = a.grad.row(r);
        for (std::size_t i = 0; i < n1; ++i) {
          double acc = 0.0;
          for (std::size_t k = 0; k < n2; ++k) acc += g[i + k] * br[k];
          ga[i] += acc;
        }
      }
      if (b.requires_grad) {
        const auto ar = a.value.row(r);
        auto gb = b.grad.row(r);
        for (std::size_t i = 0; i < n1; ++i) {
          const double ai = ar[i];
          if (ai == 0.0) continue;
          for (std::size_t k = 0; k < n2; ++k) gb[k] += g[i + k] * ai;
        }
      }
    }
  });
}

Node cross_entropy(const Matrix& target, const Node& predicted) {
  const Matrix& q = predicted.value();
  if (!target.same_shape(q)) {
    throw ShapeMismatch("cross_entropy: target " + shape_of(target) + " vs prediction " +
                        shape_of(q));
  }
  if (q.rows() == 0) throw ShapeMismatch("cross_entropy of an empty batch");
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double t = target.data()[i];
    if (t != 0.0) total -= t * std::log(std::max(q.data()[i], kLogFloor));
  }
  const double inv_rows = 1.0 / static_cast<double>(q.rows());
  return make_node("cross_entropy", Matrix(1, 1, total * inv_rows), {predicted},
                   [target, inv_rows](NodeData& self) {
                     NodeData& pn = *self.parents[0];
                     const double g = self.grad(0, 0) * inv_rows;
                     const auto qv = pn.value.data();
                     auto gq = pn.grad.data();
                     for (std::size_t i = 0; i < qv.size(); ++i) {
                       const double t = target.data()[i];
                       if (t != 0.0 && qv[i] > kLogFloor) gq[i] -= g * t / qv[i];
                     }
                   });
}

double clipped_mass(const Matrix& probs, const Matrix& atoms, const dist::SupportSpec& target) {
  const double slack = kSnapTolerance * target.delta();
  double total = 0.0;
  for (std::size_t r = 0; r < probs.rows(); ++r) {
    const std::size_t ar = atoms.rows() == 1 ? 0 : r;
    for (std::size_t j = 0; j < probs.cols(); ++j) {
      const double a = atoms(ar, j);
      if (a < target.v_min() - slack || a > target.v_max() + slack) total += probs(r, j);
    }
  }
  return total;
}

}  // namespace catdist::graph
