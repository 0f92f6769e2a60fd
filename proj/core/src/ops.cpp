#include "liclab/ops.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <utility>

namespace liclab {

namespace {

using RowMat =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ColMat = Eigen::MatrixXf;

std::shared_ptr<Node> make_result(Shape shape,
                                  std::vector<std::shared_ptr<Node>> parents,
                                  bool nonsmooth_here = false) {
  auto n = std::make_shared<Node>();
  n->value.resize(static_cast<size_t>(shape_numel(shape)));
  n->shape = std::move(shape);
  n->is_leaf = false;
  for (const auto& p : parents) {
    n->requires_grad = n->requires_grad || p->requires_grad;
    n->nonsmooth = n->nonsmooth || p->nonsmooth;
  }
  n->nonsmooth = n->nonsmooth || nonsmooth_here;
  n->parents = std::move(parents);
  return n;
}

void check_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape())
    throw Error(std::string(op) + ": shape mismatch " + shape_str(a.shape()) +
                " vs " + shape_str(b.shape()));
}

// Gather (C,H,W) source into a (C*kh*kw) x (Ho*Wo) column-major matrix,
// zero padding outside.
void im2col(const float* src, int C, int H, int W, int kh, int kw, int stride,
            int pad, int Ho, int Wo, float* cols) {
  const int rows = C * kh * kw;
  for (int oy = 0; oy < Ho; ++oy) {
    for (int ox = 0; ox < Wo; ++ox) {
      float* col = cols + static_cast<std::ptrdiff_t>(oy * Wo + ox) * rows;
      int r = 0;
      for (int c = 0; c < C; ++c) {
        const float* plane = src + static_cast<std::ptrdiff_t>(c) * H * W;
        for (int ky = 0; ky < kh; ++ky) {
          const int y = oy * stride + ky - pad;
          for (int kx = 0; kx < kw; ++kx, ++r) {
            const int x = ox * stride + kx - pad;
            col[r] = (y >= 0 && y < H && x >= 0 && x < W)
                         ? plane[y * W + x]
                         : 0.0f;
          }
        }
      }
    }
  }
}

// Adjoint of im2col: scatter-add columns back into the (C,H,W) buffer.
void col2im_add(const float* cols, int C, int H, int W, int kh, int kw,
                int stride, int pad, int Ho, int Wo, float* dst) {
  const int rows = C * kh * kw;
  for (int oy = 0; oy < Ho; ++oy) {
    for (int ox = 0; ox < Wo; ++ox) {
      const float* col = cols + static_cast<std::ptrdiff_t>(oy * Wo + ox) * rows;
      int r = 0;
      for (int c = 0; c < C; ++c) {
        float* plane = dst + static_cast<std::ptrdiff_t>(c) * H * W;
        for (int ky = 0; ky < kh; ++ky) {
          const int y = oy * stride + ky - pad;
          for (int kx = 0; kx < kw; ++kx, ++r) {
            const int x = ox * stride + kx - pad;
            if (y >= 0 && y < H && x >= 0 && x < W) plane[y * W + x] += col[r];
          }
        }
      }
    }
  }
}

double sigmoid_d(double t) { return 1.0 / (1.0 + std::exp(-t)); }
double normal_cdf(double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); }
double normal_pdf(double t) {
  return std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI);
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  check_same_shape("add", a, b);
  auto n = make_result(a.shape(), {a.node(), b.node()});
  for (size_t i = 0; i < n->value.size(); ++i)
    n->value[i] = a.data()[i] + b.data()[i];
  if (a.is_scalar() && (a.node()->precise || b.node()->precise))
    n->precise = a.item_precise() + b.item_precise();
  n->backprop = [](Node& self) {
    for (auto& p : self.parents) {
      if (!p->requires_grad) continue;
      p->ensure_grad();
      for (size_t i = 0; i < self.grad.size(); ++i) p->grad[i] += self.grad[i];
    }
  };
  return Tensor(n);
}

Tensor sub(const Tensor& a, const Tensor& b) {
  check_same_shape("sub", a, b);
  auto n = make_result(a.shape(), {a.node(), b.node()});
  for (size_t i = 0; i < n->value.size(); ++i)
    n->value[i] = a.data()[i] - b.data()[i];
  if (a.is_scalar() && (a.node()->precise || b.node()->precise))
    n->precise = a.item_precise() - b.item_precise();
  n->backprop = [](Node& self) {
    auto& pa = self.parents[0];
    auto& pb = self.parents[1];
    if (pa->requires_grad) {
      pa->ensure_grad();
      for (size_t i = 0; i < self.grad.size(); ++i) pa->grad[i] += self.grad[i];
    }
    if (pb->requires_grad) {
      pb->ensure_grad();
      for (size_t i = 0; i < self.grad.size(); ++i) pb->grad[i] -= self.grad[i];
    }
  };
  return Tensor(n);
}

Tensor mul(const Tensor& a, const Tensor& b) {
  check_same_shape("mul", a, b);
  auto n = make_result(a.shape(), {a.node(), b.node()});
  for (size_t i = 0; i < n->value.size(); ++i)
    n->value[i] = a.data()[i] * b.data()[i];
  n->backprop = [](Node& self) {
    auto& pa = self.parents[0];
    auto& pb = self.parents[1];
    if (pa->requires_grad) {
      pa->ensure_grad();
      for (size_t i = 0; i < self.grad.size(); ++i)
        pa->grad[i] += self.grad[i] * pb->value[i];
    }
    if (pb->requires_grad) {
      pb->ensure_grad();
      for (size_t i = 0; i < self.grad.size(); ++i)
        pb->grad[i] += self.grad[i] * pa->value[i];
    }
  };
  return Tensor(n);
}

Tensor scalar_mul(const Tensor& a, float c) {
  auto n = make_result(a.shape(), {a.node()});
  for (size_t i = 0; i < n->value.size(); ++i) n->value[i] = a.data()[i] * c;
  if (a.is_scalar() && a.node()->precise)
    n->precise = *a.node()->precise * static_cast<double>(c);
  n->backprop = [c](Node& self) {
    auto& p = self.parents[0];
    p->ensure_grad();
    for (size_t i = 0; i < self.grad.size(); ++i)
      p->grad[i] += self.grad[i] * c;
  };
  return Tensor(n);
}

Tensor scalar_add(const Tensor& a, float c) {
  auto n = make_result(a.shape(), {a.node()});
  for (size_t i = 0; i < n->value.size(); ++i) n->value[i] = a.data()[i] + c;
  if (a.is_scalar() && a.node()->precise)
    n->precise = *a.node()->precise + static_cast<double>(c);
  n->backprop = [](Node& self) {
    auto& p = self.parents[0];
    p->ensure_grad();
    for (size_t i = 0; i < self.grad.size(); ++i) p->grad[i] += self.grad[i];
  };
  return Tensor(n);
}

Tensor clamp(const Tensor& a, float lo, float hi) {
  if (lo > hi) throw Error("clamp: lo > hi");
  bool saturates = false;
  auto n = make_result(a.shape(), {a.node()});
  for (size_t i = 0; i < n->value.size(); ++i) {
    float v = a.data()[i];
    if (v < lo || v > hi) saturates = true;
    n->value[i] = std::min(hi, std::max(lo, v));
  }
  n->nonsmooth = n->nonsmooth || saturates;
  n->backprop = [lo, hi](Node& self) {
    auto& p = self.parents[0];
    p->ensure_grad();
    for (size_t i = 0; i < self.grad.size(); ++i)
      if (p->value[i] >= lo && p->value[i] <= hi)
        p->grad[i] += self.grad[i];
  };
  return Tensor(n);
}

Tensor leaky_relu(const Tensor& a, float slope) {
  auto n = make_result(a.shape(), {a.node()});
  for (size_t i = 0; i < n->value.size(); ++i) {
    float v = a.data()[i];
    n->value[i] = v >= 0.0f ? v : slope * v;
  }
  n->backprop = [slope](Node& self) {
    auto& p = self.parents[0];
    p->ensure_grad();
    for (size_t i = 0; i < self.grad.size(); ++i)
      p->grad[i] += self.grad[i] * (p->value[i] >= 0.0f ? 1.0f : slope);
  };
  return Tensor(n);
}

Tensor abs(const Tensor& a) {
  auto n = make_result(a.shape(), {a.node()});
  for (size_t i = 0; i < n->value.size(); ++i)
    n->value[i] = std::fabs(a.data()[i]);
  n->backprop = [](Node& self) {
    auto& p = self.parents[0];
    p->ensure_grad();
    for (size_t i = 0; i < self.grad.size(); ++i) {
      float v = p->value[i];
      p->grad[i] += self.grad[i] * (v > 0.0f ? 1.0f : (v < 0.0f ? -1.0f : 0.0f));
    }
  };
  return Tensor(n);
}

Tensor sign(const Tensor& a) {
  auto n = make_result(a.shape(), {a.node()}, /*nonsmooth_here=*/true);
  for (size_t i = 0; i < n->value.size(); ++i) {
    float v = a.data()[i];
    n->value[i] = v > 0.0f ? 1.0f : (v < 0.0f ? -1.0f : 0.0f);
  }
  n->backprop = [](Node& self) {
    self.parents[0]->ensure_grad();  // gradient is zero everywhere
  };
  return Tensor(n);
}

Tensor exp(const Tensor& a) {
  auto n = make_result(a.shape(), {a.node()});
  for (size_t i = 0; i < n->value.size(); ++i)
    n->value[i] = std::exp(a.data()[i]);
  n->backprop = [](Node& self) {
    auto& p = self.parents[0];
    p->ensure_grad();
    for (size_t i = 0; i < self.grad.size(); ++i)
      p->grad[i] += self.grad[i] * self.value[i];
  };
  return Tensor(n);
}

Tensor log(const Tensor& a) {
  auto n = make_result(a.shape(), {a.node()});
  for (size_t i = 0; i < n->value.size(); ++i)
    n->value[i] = std::log(a.data()[i]);
  if (a.is_scalar() && a.node()->precise)
    n->precise = std::log(*a.node()->precise);
  n->backprop = [](Node& self) {
    auto& p = self.parents[0];
    p->ensure_grad();
    for (size_t i = 0; i < self.grad.size(); ++i)
      p->grad[i] += self.grad[i] / p->value[i];
  };
  return Tensor(n);
}

Tensor log2(const Tensor& a) {
  auto n = make_result(a.shape(), {a.node()});
  for (size_t i = 0; i < n->value.size(); ++i)
    n->value[i] = std::log2(a.data()[i]);
  if (a.is_scalar() && a.node()->precise)
    n->precise = std::log2(*a.node()->precise);
  n->backprop = [](Node& self) {
    const float inv_ln2 = 1.0f / 0.6931471805599453f;
    auto& p = self.parents[0];
    p->ensure_grad();
    for (size_t i = 0; i < self.grad.size(); ++i)
      p->grad[i] += self.grad[i] * inv_ln2 / p->value[i];
  };
  return Tensor(n);
}

Tensor round_ste(const Tensor& a) {
  auto n = make_result(a.shape(), {a.node()}, /*nonsmooth_here=*/true);
  for (size_t i = 0; i < n->value.size(); ++i)
    n->value[i] = std::nearbyint(a.data()[i]);
  n->backprop = [](Node& self) {
    auto& p = self.parents[0];
    p->ensure_grad();
    for (size_t i = 0; i < self.grad.size(); ++i) p->grad[i] += self.grad[i];
  };
  return Tensor(n);
}

Tensor add_uniform_noise(const Tensor& a, Rng& rng) {
  auto n = make_result(a.shape(), {a.node()});
  for (size_t i = 0; i < n->value.size(); ++i)
    n->value[i] = a.data()[i] + rng.uniform(-0.5f, 0.5f);
  n->backprop = [](Node& self) {
    auto& p = self.parents[0];
    p->ensure_grad();
    for (size_t i = 0; i < self.grad.size(); ++i) p->grad[i] += self.grad[i];
  };
  return Tensor(n);
}

Tensor sum(const Tensor& a) {
  auto n = make_result({1}, {a.node()});
  double acc = 0.0;
  for (float v : a.data()) acc += static_cast<double>(v);
  n->value[0] = static_cast<float>(acc);
  n->precise = acc;
  n->backprop = [](Node& self) {
    auto& p = self.parents[0];
    p->ensure_grad();
    for (size_t i = 0; i < p->grad.size(); ++i) p->grad[i] += self.grad[0];
  };
  return Tensor(n);
}

Tensor mean(const Tensor& a) {
  auto n = make_result({1}, {a.node()});
  double acc = 0.0;
  for (float v : a.data()) acc += static_cast<double>(v);
  acc /= static_cast<double>(a.size());
  n->value[0] = static_cast<float>(acc);
  n->precise = acc;
  n->backprop = [](Node& self) {
    auto& p = self.parents[0];
    p->ensure_grad();
    const float g = self.grad[0] / static_cast<float>(p->value.size());
    for (size_t i = 0; i < p->grad.size(); ++i) p->grad[i] += g;
  };
  return Tensor(n);
}

Tensor mse(const Tensor& a, const Tensor& b) {
  check_same_shape("mse", a, b);
  auto n = make_result({1}, {a.node(), b.node()});
  double acc = 0.0;
  for (size_t i = 0; i < a.data().size(); ++i) {
    double d = static_cast<double>(a.data()[i]) - b.data()[i];
    acc += d * d;
  }
  acc /= static_cast<double>(a.size());
  n->value[0] = static_cast<float>(acc);
  n->precise = acc;
  n->backprop = [](Node& self) {
    auto& pa = self.parents[0];
    auto& pb = self.parents[1];
    const float g = 2.0f * self.grad[0] / static_cast<float>(pa->value.size());
    if (pa->requires_grad) {
      pa->ensure_grad();
      for (size_t i = 0; i < pa->grad.size(); ++i)
        pa->grad[i] += g * (pa->value[i] - pb->value[i]);
    }
    if (pb->requires_grad) {
      pb->ensure_grad();
      for (size_t i = 0; i < pb->grad.size(); ++i)
        pb->grad[i] -= g * (pa->value[i] - pb->value[i]);
    }
  };
  return Tensor(n);
}

Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& b, int stride,
              int pad) {
  if (x.shape().size() != 4 || w.shape().size() != 4)
    throw Error("conv2d: expected 4-D input and weight, got " +
                shape_str(x.shape()) + " and " + shape_str(w.shape()));
  const int N = x.shape()[0], Ci = x.shape()[1], H = x.shape()[2],
            W = x.shape()[3];
  const int Co = w.shape()[0], kh = w.shape()[2], kw = w.shape()[3];
  if (w.shape()[1] != Ci)
    throw Error("conv2d: input channels " + std::to_string(Ci) +
                " do not match weight " + shape_str(w.shape()));
  if (b.shape() != Shape{Co})
    throw Error("conv2d: bias shape " + shape_str(b.shape()) +
                " does not match out channels " + std::to_string(Co));
  if (stride < 1) throw Error("conv2d: stride must be >= 1");
  const int Ho = (H + 2 * pad - kh) / stride + 1;
  const int Wo = (W + 2 * pad - kw) / stride + 1;
  if (Ho < 1 || Wo < 1)
    throw Error("conv2d: kernel " + shape_str(w.shape()) +
                " too large for input " + shape_str(x.shape()));

  auto n = make_result({N, Co, Ho, Wo}, {x.node(), w.node(), b.node()});
  const int rows = Ci * kh * kw;
  std::vector<float> cols(static_cast<size_t>(rows) * Ho * Wo);
  Eigen::Map<const RowMat> wm(w.data().data(), Co, rows);
  Eigen::Map<const Eigen::VectorXf> bv(b.data().data(), Co);
  for (int i = 0; i < N; ++i) {
    im2col(x.data().data() + static_cast<std::ptrdiff_t>(i) * Ci * H * W, Ci,
           H, W, kh, kw, stride, pad, Ho, Wo, cols.data());
    Eigen::Map<const ColMat> cm(cols.data(), rows, Ho * Wo);
    Eigen::Map<RowMat> om(
        n->value.data() + static_cast<std::ptrdiff_t>(i) * Co * Ho * Wo, Co,
        Ho * Wo);
    om.noalias() = wm * cm;
    om.colwise() += bv;
  }

  n->backprop = [N, Ci, H, W, Co, kh, kw, stride, pad, Ho, Wo](Node& self) {
    auto& px = self.parents[0];
    auto& pw = self.parents[1];
    auto& pb = self.parents[2];
    const int rows = Ci * kh * kw;
    std::vector<float> cols(static_cast<size_t>(rows) * Ho * Wo);
    std::vector<float> dcols(static_cast<size_t>(rows) * Ho * Wo);
    Eigen::Map<const RowMat> wm(pw->value.data(), Co, rows);
    if (px->requires_grad) px->ensure_grad();
    if (pw->requires_grad) pw->ensure_grad();
    if (pb->requires_grad) pb->ensure_grad();
    for (int i = 0; i < N; ++i) {
      Eigen::Map<const RowMat> gm(
          self.grad.data() + static_cast<std::ptrdiff_t>(i) * Co * Ho * Wo, Co,
          Ho * Wo);
      if (pw->requires_grad) {
        im2col(px->value.data() + static_cast<std::ptrdiff_t>(i) * Ci * H * W,
               Ci, H, W, kh, kw, stride, pad, Ho, Wo, cols.data());
        Eigen::Map<const ColMat> cm(cols.data(), rows, Ho * Wo);
        Eigen::Map<RowMat> dwm(pw->grad.data(), Co, rows);
        dwm.noalias() += gm * cm.transpose();
      }
      if (pb->requires_grad) {
        Eigen::Map<Eigen::VectorXf> dbv(pb->grad.data(), Co);
        dbv += gm.rowwise().sum();
      }
      if (px->requires_grad) {
        Eigen::Map<ColMat> dcm(dcols.data(), rows, Ho * Wo);
        dcm.noalias() = wm.transpose() * gm;
        col2im_add(dcols.data(), Ci, H, W, kh, kw, stride, pad, Ho, Wo,
                   px->grad.data() + static_cast<std::ptrdiff_t>(i) * Ci * H * W);
      }
    }
  };
  return Tensor(n);
}

Tensor conv_transpose2d(const Tensor& x, const Tensor& w, const Tensor& b,
                        int stride, int pad, int out_pad) {
  if (x.shape().size() != 4 || w.shape().size() != 4)
    throw Error("conv_transpose2d: expected 4-D input and weight, got " +
                shape_str(x.shape()) + " and " + shape_str(w.shape()));
  const int N = x.shape()[0], Ci = x.shape()[1], Hi = x.shape()[2],
            Wi = x.shape()[3];
  const int Co = w.shape()[1], kh = w.shape()[2], kw = w.shape()[3];
  if (w.shape()[0] != Ci)
    throw Error("conv_transpose2d: input channels " + std::to_string(Ci) +
                " do not match weight " + shape_str(w.shape()));
  if (b.shape() != Shape{Co})
    throw Error("conv_transpose2d: bias shape " + shape_str(b.shape()) +
                " does not match out channels " + std::to_string(Co));
  if (stride < 1) throw Error("conv_transpose2d: stride must be >= 1");
  if (out_pad < 0 || out_pad >= stride)
    throw Error("conv_transpose2d: out_pad must be in [0, stride)");
  const int Ho = (Hi - 1) * stride - 2 * pad + kh + out_pad;
  const int Wo = (Wi - 1) * stride - 2 * pad + kw + out_pad;
  if (Ho < 1 || Wo < 1)
    throw Error("conv_transpose2d: degenerate output for input " +
                shape_str(x.shape()));

  auto n = make_result({N, Co, Ho, Wo}, {x.node(), w.node(), b.node()});
  const int rows = Co * kh * kw;
  std::vector<float> cols(static_cast<size_t>(rows) * Hi * Wi);
  // Weight viewed as (Ci, Co*kh*kw); forward is the exact adjoint of the
  // conv2d that maps (Co,Ho,Wo) -> (Ci,Hi,Wi) with the same stride/pad.
  Eigen::Map<const RowMat> wm(w.data().data(), Ci, rows);
  std::fill(n->value.begin(), n->value.end(), 0.0f);
  for (int i = 0; i < N; ++i) {
    Eigen::Map<const RowMat> xm(
        x.data().data() + static_cast<std::ptrdiff_t>(i) * Ci * Hi * Wi, Ci,
        Hi * Wi);
    Eigen::Map<ColMat> cm(cols.data(), rows, Hi * Wi);
    cm.noalias() = wm.transpose() * xm;
    col2im_add(cols.data(), Co, Ho, Wo, kh, kw, stride, pad, Hi, Wi,
               n->value.data() + static_cast<std::ptrdiff_t>(i) * Co * Ho * Wo);
  }
  for (int i = 0; i < N; ++i)
    for (int c = 0; c < Co; ++c) {
      float* plane = n->value.data() +
                     (static_cast<std::ptrdiff_t>(i) * Co + c) * Ho * Wo;
      const float bc = b.data()[c];
      for (int j = 0; j < Ho * Wo; ++j) plane[j] += bc;
    }

  n->backprop = [N, Ci, Hi, Wi, Co, kh, kw, stride, pad, Ho, Wo](Node& self) {
    auto& px = self.parents[0];
    auto& pw = self.parents[1];
    auto& pb = self.parents[2];
    const int rows = Co * kh * kw;
    std::vector<float> cols(static_cast<size_t>(rows) * Hi * Wi);
    Eigen::Map<const RowMat> wm(pw->value.data(), Ci, rows);
    if (px->requires_grad) px->ensure_grad();
    if (pw->requires_grad) pw->ensure_grad();
    if (pb->requires_grad) pb->ensure_grad();
    for (int i = 0; i < N; ++i) {
      const float* g =
          self.grad.data() + static_cast<std::ptrdiff_t>(i) * Co * Ho * Wo;
      im2col(g, Co, Ho, Wo, kh, kw, stride, pad, Hi, Wi, cols.data());
      Eigen::Map<const ColMat> cm(cols.data(), rows, Hi * Wi);
      if (px->requires_grad) {
        Eigen::Map<RowMat> dxm(
            px->grad.data() + static_cast<std::ptrdiff_t>(i) * Ci * Hi * Wi,
            Ci, Hi * Wi);
        dxm.noalias() += wm * cm;
      }
      if (pw->requires_grad) {
        Eigen::Map<const RowMat> xm(
            px->value.data() + static_cast<std::ptrdiff_t>(i) * Ci * Hi * Wi,
            Ci, Hi * Wi);
        Eigen::Map<RowMat> dwm(pw->grad.data(), Ci, rows);
        dwm.noalias() += xm * cm.transpose();
      }
      if (pb->requires_grad) {
        for (int c = 0; c < Co; ++c) {
          const float* plane = g + static_cast<std::ptrdiff_t>(c) * Ho * Wo;
          float acc = 0.0f;
          for (int j = 0; j < Ho * Wo; ++j) acc += plane[j];
          pb->grad[c] += acc;
        }
      }
    }
  };
  return Tensor(n);
}

Tensor logistic_mass(const Tensor& y, const Tensor& mu, const Tensor& log_s) {
  if (y.shape().size() != 4)
    throw Error("logistic_mass: expected N×C×H×W input, got " +
                shape_str(y.shape()));
  const int C = y.shape()[1];
  if (mu.shape() != Shape{C} || log_s.shape() != Shape{C})
    throw Error("logistic_mass: per-channel params must have shape [" +
                std::to_string(C) + "], got " + shape_str(mu.shape()) +
                " and " + shape_str(log_s.shape()));
  const int N = y.shape()[0], HW = y.shape()[2] * y.shape()[3];
  auto n = make_result(y.shape(), {y.node(), mu.node(), log_s.node()});
  size_t idx = 0;
  for (int i = 0; i < N; ++i)
    for (int c = 0; c < C; ++c) {
      const double m = mu.data()[c];
      const double s = std::exp(static_cast<double>(log_s.data()[c]));
      for (int j = 0; j < HW; ++j, ++idx) {
        const double v = y.data()[idx];
        const double p =
            sigmoid_d((v + 0.5 - m) / s) - sigmoid_d((v - 0.5 - m) / s);
        n->value[idx] = static_cast<float>(
            std::min(1.0, std::max(static_cast<double>(kLikelihoodFloor), p)));
      }
    }
  n->backprop = [N, C, HW](Node& self) {
    auto& py = self.parents[0];
    auto& pmu = self.parents[1];
    auto& pls = self.parents[2];
    if (py->requires_grad) py->ensure_grad();
    if (pmu->requires_grad) pmu->ensure_grad();
    if (pls->requires_grad) pls->ensure_grad();
    size_t idx = 0;
    for (int i = 0; i < N; ++i)
      for (int c = 0; c < C; ++c) {
        const double m = pmu->value[c];
        const double s = std::exp(static_cast<double>(pls->value[c]));
        for (int j = 0; j < HW; ++j, ++idx) {
          // Gradient is zero where the floor clamp was active.
          if (self.value[idx] <= kLikelihoodFloor) continue;
          const double a = (py->value[idx] + 0.5 - m) / s;
          const double b = (py->value[idx] - 0.5 - m) / s;
          const double sa = sigmoid_d(a), sb = sigmoid_d(b);
          const double da = sa * (1.0 - sa), db = sb * (1.0 - sb);
          const float g = self.grad[idx];
          if (py->requires_grad)
            py->grad[idx] += g * static_cast<float>((da - db) / s);
          if (pmu->requires_grad)
            pmu->grad[c] += g * static_cast<float>(-(da - db) / s);
          if (pls->requires_grad)
            pls->grad[c] += g * static_cast<float>(-da * a + db * b);
        }
      }
  };
  return Tensor(n);
}

Tensor gaussian_mass(const Tensor& y, const Tensor& sigma, float sigma_min) {
  check_same_shape("gaussian_mass", y, sigma);
  if (sigma_min <= 0.0f) throw Error("gaussian_mass: sigma_min must be > 0");
  for (float s : sigma.data())
    if (s < 0.0f)
      throw Error(
          "gaussian_mass: negative sigma input; apply exp upstream");
  auto n = make_result(y.shape(), {y.node(), sigma.node()});
  for (size_t i = 0; i < n->value.size(); ++i) {
    const double s = std::max(static_cast<double>(sigma.data()[i]),
                              static_cast<double>(sigma_min));
    const double v = y.data()[i];
    const double p = normal_cdf((v + 0.5) / s) - normal_cdf((v - 0.5) / s);
    n->value[i] = static_cast<float>(
        std::min(1.0, std::max(static_cast<double>(kLikelihoodFloor), p)));
  }
  n->backprop = [sigma_min](Node& self) {
    auto& py = self.parents[0];
    auto& ps = self.parents[1];
    if (py->requires_grad) py->ensure_grad();
    if (ps->requires_grad) ps->ensure_grad();
    for (size_t i = 0; i < self.grad.size(); ++i) {
      if (self.value[i] <= kLikelihoodFloor) continue;
      const bool clamped = ps->value[i] < sigma_min;
      const double s = clamped ? static_cast<double>(sigma_min)
                               : static_cast<double>(ps->value[i]);
      const double a = (py->value[i] + 0.5) / s;
      const double b = (py->value[i] - 0.5) / s;
      const double fa = normal_pdf(a), fb = normal_pdf(b);
      const float g = self.grad[i];
      if (py->requires_grad)
        py->grad[i] += g * static_cast<float>((fa - fb) / s);
      if (ps->requires_grad && !clamped)
        ps->grad[i] += g * static_cast<float>((-fa * a + fb * b) / s);
    }
  };
  return Tensor(n);
}

}  // namespace liclab
