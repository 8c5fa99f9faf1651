#include "physq/gnn.hpp"

#include <algorithm>
#include <cmath>

namespace physq::gnn {

// ---------------------------------------------------------------------------
// Linear algebra pieces
// ---------------------------------------------------------------------------

void Linear::init(int in_, int out_, RngStream& rng) {
  in = in_;
  out = out_;
  w.assign(static_cast<std::size_t>(in) * out, 0.0);
  b.assign(static_cast<std::size_t>(out), 0.0);
  const double s = std::sqrt(1.0 / in);
  for (auto& v : w) v = rng.uniform(-s, s);
  for (auto& v : b) v = rng.uniform(-s, s);
}

void Linear::zero(int in_, int out_) {
  in = in_;
  out = out_;
  w.assign(static_cast<std::size_t>(in) * out, 0.0);
  b.assign(static_cast<std::size_t>(out), 0.0);
}

std::vector<double> Linear::apply(const std::vector<double>& x) const {
  std::vector<double> y(static_cast<std::size_t>(out));
  for (int r = 0; r < out; ++r) {
    double acc = b[static_cast<std::size_t>(r)];
    const double* row = w.data() + static_cast<std::size_t>(r) * in;
    for (int c = 0; c < in; ++c) acc += row[c] * x[static_cast<std::size_t>(c)];
    y[static_cast<std::size_t>(r)] = acc;
  }
  return y;
}

namespace {

// gradW += dy (x) x^T, gradb += dy, dx += W^T dy
void linear_backward(const Linear& layer, Linear& grad,
                     const std::vector<double>& x,
                     const std::vector<double>& dy, std::vector<double>* dx) {
  for (int r = 0; r < layer.out; ++r) {
    const double g = dy[static_cast<std::size_t>(r)];
    if (g == 0.0) continue;
    double* grow = grad.w.data() + static_cast<std::size_t>(r) * layer.in;
    const double* wrow = layer.w.data() + static_cast<std::size_t>(r) * layer.in;
    for (int c = 0; c < layer.in; ++c) {
      grow[c] += g * x[static_cast<std::size_t>(c)];
      if (dx) (*dx)[static_cast<std::size_t>(c)] += wrow[c] * g;
    }
    grad.b[static_cast<std::size_t>(r)] += g;
  }
}

std::vector<double> relu(std::vector<double> v) {
  for (auto& x : v) x = std::max(0.0, x);
  return v;
}

// d(relu(pre)) -> dpre
std::vector<double> relu_backward(const std::vector<double>& pre,
                                  const std::vector<double>& dpost) {
  std::vector<double> d(pre.size());
  for (std::size_t i = 0; i < pre.size(); ++i) {
    d[i] = pre[i] > 0.0 ? dpost[i] : 0.0;
  }
  return d;
}

std::vector<double> concat(const std::vector<double>& a,
                           const std::vector<double>& b) {
  std::vector<double> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

template <std::size_t K>
std::array<double, K> softmax(const std::array<double, K>& z) {
  std::array<double, K> p;
  double mx = z[0];
  for (double v : z) mx = std::max(mx, v);
  double sum = 0.0;
  for (std::size_t i = 0; i < K; ++i) {
    p[i] = std::exp(z[i] - mx);
    sum += p[i];
  }
  for (auto& v : p) v /= sum;
  return p;
}

}  // namespace

void PPLParams::init(int t_frames_, int hidden_, RngStream& rng) {
  t_frames = t_frames_;
  hidden = hidden_;
  f_emb.init(2 * t_frames, hidden, rng);
  for (auto& l : f_rel) l.init(2 * hidden, hidden, rng);
  for (auto& l : f_enc) l.init(hidden, hidden, rng);
  f_v_pred.init(hidden, 2, rng);
  f_e_pred.init(hidden, 3, rng);
}

void DynParams::init(int hidden_, RngStream& rng) {
  hidden = hidden_;
  for (auto& l : g_emb) l.init(2 * kObjDim, hidden, rng);
  for (auto& l : g_rel) l.init(hidden, kObjDim, rng);
  for (auto& l : g_enc) l.init(4 * kObjDim, hidden, rng);
  g_pred.init(kObjDim, 4, rng);
  // warm start at "copy the newest frame": residual branches open at zero,
  // the head picks the newest (x, y, w, h) at offsets 10..13 of the window
  for (auto& l : g_rel) std::fill(l.w.begin(), l.w.end(), 0.0);
  for (auto& l : g_rel) std::fill(l.b.begin(), l.b.end(), 0.0);
  std::fill(g_pred.w.begin(), g_pred.w.end(), 0.0);
  std::fill(g_pred.b.begin(), g_pred.b.end(), 0.0);
  for (int d = 0; d < 4; ++d) {
    g_pred.w[static_cast<std::size_t>(d) * kObjDim + 10 +
             static_cast<std::size_t>(d)] = 1.0;
  }
}

int gate_index(ChargeRel rel) {
  switch (rel) {
    case ChargeRel::same: return 0;
    case ChargeRel::opposite: return 1;
    default: return 2;
  }
}

void for_each_block(PPLParams& p,
                    const std::function<void(const std::string&, Linear&)>& fn) {
  fn("f_emb", p.f_emb);
  fn("f_rel0", p.f_rel[0]);
  fn("f_rel1", p.f_rel[1]);
  fn("f_enc0", p.f_enc[0]);
  fn("f_enc1", p.f_enc[1]);
  fn("f_v_pred", p.f_v_pred);
  fn("f_e_pred", p.f_e_pred);
}

void for_each_block(DynParams& p,
                    const std::function<void(const std::string&, Linear&)>& fn) {
  fn("g_emb_same", p.g_emb[0]);
  fn("g_emb_opposite", p.g_emb[1]);
  fn("g_emb_none", p.g_emb[2]);
  fn("g_rel0", p.g_rel[0]);
  fn("g_rel1", p.g_rel[1]);
  fn("g_enc_same", p.g_enc[0]);
  fn("g_enc_opposite", p.g_enc[1]);
  fn("g_enc_none", p.g_enc[2]);
  fn("g_pred", p.g_pred);
}

// ---------------------------------------------------------------------------
// PPL forward / backward
// ---------------------------------------------------------------------------

namespace {

struct PplCache {
  int n = 0;
  std::vector<std::vector<double>> x;
  std::vector<std::vector<double>> a0, v0;  // emb pre / post
  std::vector<std::vector<double>> r0, e0;  // rel0 pre / post, index i*n+j
  std::vector<std::vector<double>> s0;      // per-node aggregate
  std::vector<std::vector<double>> c0, v1;  // enc0 pre / post
  std::vector<std::vector<double>> r1, e1;
  std::vector<std::vector<double>> s1;
  std::vector<std::vector<double>> c1, v2;
};

PPLOutput ppl_forward_cached(const std::vector<std::vector<double>>& trajs,
                             const PPLParams& p, PplCache& c) {
  const int n = static_cast<int>(trajs.size());
  c.n = n;
  c.x = trajs;
  c.a0.resize(static_cast<std::size_t>(n));
  c.v0.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    c.a0[static_cast<std::size_t>(i)] = p.f_emb.apply(trajs[static_cast<std::size_t>(i)]);
    c.v0[static_cast<std::size_t>(i)] = relu(c.a0[static_cast<std::size_t>(i)]);
  }
  auto pair_pass = [&](const std::vector<std::vector<double>>& v,
                       const Linear& rel, const Linear& enc,
                       std::vector<std::vector<double>>& r,
                       std::vector<std::vector<double>>& e,
                       std::vector<std::vector<double>>& s,
                       std::vector<std::vector<double>>& cpre,
                       std::vector<std::vector<double>>& vnext) {
    r.assign(static_cast<std::size_t>(n) * n, {});
    e.assign(static_cast<std::size_t>(n) * n, {});
    s.assign(static_cast<std::size_t>(n), std::vector<double>(
                                              static_cast<std::size_t>(p.hidden), 0.0));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const auto idx = static_cast<std::size_t>(i * n + j);
        r[idx] = rel.apply(concat(v[static_cast<std::size_t>(i)],
                                  v[static_cast<std::size_t>(j)]));
        e[idx] = relu(r[idx]);
        for (int h = 0; h < p.hidden; ++h) {
          s[static_cast<std::size_t>(i)][static_cast<std::size_t>(h)] +=
              e[idx][static_cast<std::size_t>(h)];
        }
      }
    }
    cpre.resize(static_cast<std::size_t>(n));
    vnext.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      cpre[static_cast<std::size_t>(i)] = enc.apply(s[static_cast<std::size_t>(i)]);
      vnext[static_cast<std::size_t>(i)] = relu(cpre[static_cast<std::size_t>(i)]);
    }
  };
  pair_pass(c.v0, p.f_rel[0], p.f_enc[0], c.r0, c.e0, c.s0, c.c0, c.v1);
  pair_pass(c.v1, p.f_rel[1], p.f_enc[1], c.r1, c.e1, c.s1, c.c1, c.v2);

  PPLOutput out;
  out.mass_logits.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto y = p.f_v_pred.apply(c.v2[static_cast<std::size_t>(i)]);
    out.mass_logits[static_cast<std::size_t>(i)] = {y[0], y[1]};
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto y =
          p.f_e_pred.apply(c.e1[static_cast<std::size_t>(i * n + j)]);
      out.edge_logits[{i, j}] = {y[0], y[1], y[2]};
    }
  }
  return out;
}

// cross-entropy loss over mass nodes and edge classes; fills grads when given
double ppl_loss_grad(const std::vector<std::vector<double>>& trajs,
                     const std::vector<int>& mass_targets,
                     const std::map<std::pair<int, int>, int>& edge_targets,
                     const PPLParams& p, PPLParams* grads) {
  PplCache c;
  const PPLOutput out = ppl_forward_cached(trajs, p, c);
  const int n = c.n;

  double loss = 0.0;
  std::vector<std::array<double, 2>> dmass(static_cast<std::size_t>(n),
                                           {0.0, 0.0});
  for (int i = 0; i < n; ++i) {
    const auto pdist = softmax(out.mass_logits[static_cast<std::size_t>(i)]);
    const int t = mass_targets[static_cast<std::size_t>(i)];
    loss += -std::log(std::max(pdist[static_cast<std::size_t>(t)], 1e-300)) / n;
    for (int k = 0; k < 2; ++k) {
      dmass[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
          (pdist[static_cast<std::size_t>(k)] - (k == t ? 1.0 : 0.0)) / n;
    }
  }
  std::map<std::pair<int, int>, std::array<double, 3>> dedge;
  const double edge_count = std::max<std::size_t>(edge_targets.size(), 1);
  for (const auto& [key, t] : edge_targets) {
    const auto pdist = softmax(out.edge_logits.at(key));
    loss += -std::log(std::max(pdist[static_cast<std::size_t>(t)], 1e-300)) /
            edge_count;
    std::array<double, 3> d;
    for (int k = 0; k < 3; ++k) {
      d[static_cast<std::size_t>(k)] =
          (pdist[static_cast<std::size_t>(k)] - (k == t ? 1.0 : 0.0)) /
          edge_count;
    }
    dedge[key] = d;
  }
  if (!grads) return loss;

  const std::size_t H = static_cast<std::size_t>(p.hidden);
  std::vector<std::vector<double>> dv2(static_cast<std::size_t>(n),
                                       std::vector<double>(H, 0.0));
  std::vector<std::vector<double>> de1(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) de1[static_cast<std::size_t>(i * n + j)].assign(H, 0.0);
    }
  }

  // heads
  for (int i = 0; i < n; ++i) {
    const std::vector<double> dy = {dmass[static_cast<std::size_t>(i)][0],
                                    dmass[static_cast<std::size_t>(i)][1]};
    linear_backward(p.f_v_pred, grads->f_v_pred, c.v2[static_cast<std::size_t>(i)],
                    dy, &dv2[static_cast<std::size_t>(i)]);
  }
  for (const auto& [key, d] : dedge) {
    const auto idx = static_cast<std::size_t>(key.first * n + key.second);
    const std::vector<double> dy = {d[0], d[1], d[2]};
    linear_backward(p.f_e_pred, grads->f_e_pred, c.e1[idx], dy, &de1[idx]);
  }

  // second message-passing round
  std::vector<std::vector<double>> dv1(static_cast<std::size_t>(n),
                                       std::vector<double>(H, 0.0));
  {
    std::vector<std::vector<double>> ds1(static_cast<std::size_t>(n),
                                         std::vector<double>(H, 0.0));
    for (int i = 0; i < n; ++i) {
      const auto dc1 = relu_backward(c.c1[static_cast<std::size_t>(i)],
                                     dv2[static_cast<std::size_t>(i)]);
      linear_backward(p.f_enc[1], grads->f_enc[1], c.s1[static_cast<std::size_t>(i)],
                      dc1, &ds1[static_cast<std::size_t>(i)]);
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const auto idx = static_cast<std::size_t>(i * n + j);
        for (std::size_t h = 0; h < H; ++h) {
          de1[idx][h] += ds1[static_cast<std::size_t>(i)][h];
        }
        const auto dr1 = relu_backward(c.r1[idx], de1[idx]);
        std::vector<double> dcat(2 * H, 0.0);
        linear_backward(p.f_rel[1], grads->f_rel[1],
                        concat(c.v1[static_cast<std::size_t>(i)],
                               c.v1[static_cast<std::size_t>(j)]),
                        dr1, &dcat);
        for (std::size_t h = 0; h < H; ++h) {
          dv1[static_cast<std::size_t>(i)][h] += dcat[h];
          dv1[static_cast<std::size_t>(j)][h] += dcat[H + h];
        }
      }
    }
  }

  // first round
  std::vector<std::vector<double>> dv0(static_cast<std::size_t>(n),
                                       std::vector<double>(H, 0.0));
  {
    std::vector<std::vector<double>> ds0(static_cast<std::size_t>(n),
                                         std::vector<double>(H, 0.0));
    for (int i = 0; i < n; ++i) {
      const auto dc0 = relu_backward(c.c0[static_cast<std::size_t>(i)],
                                     dv1[static_cast<std::size_t>(i)]);
      linear_backward(p.f_enc[0], grads->f_enc[0], c.s0[static_cast<std::size_t>(i)],
                      dc0, &ds0[static_cast<std::size_t>(i)]);
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const auto idx = static_cast<std::size_t>(i * n + j);
        const auto dr0 = relu_backward(c.r0[idx], ds0[static_cast<std::size_t>(i)]);
        std::vector<double> dcat(2 * H, 0.0);
        linear_backward(p.f_rel[0], grads->f_rel[0],
                        concat(c.v0[static_cast<std::size_t>(i)],
                               c.v0[static_cast<std::size_t>(j)]),
                        dr0, &dcat);
        for (std::size_t h = 0; h < H; ++h) {
          dv0[static_cast<std::size_t>(i)][h] += dcat[h];
          dv0[static_cast<std::size_t>(j)][h] += dcat[H + h];
        }
      }
    }
  }

  // embedding
  for (int i = 0; i < n; ++i) {
    const auto da0 = relu_backward(c.a0[static_cast<std::size_t>(i)],
                                   dv0[static_cast<std::size_t>(i)]);
    linear_backward(p.f_emb, grads->f_emb, c.x[static_cast<std::size_t>(i)], da0,
                    nullptr);
  }
  return loss;
}

}  // namespace

PPLOutput ppl_forward(const std::vector<std::vector<double>>& trajectories,
                      const PPLParams& params) {
  for (const auto& t : trajectories) {
    if (static_cast<int>(t.size()) != 2 * params.t_frames) {
      throw SimError("trajectory length mismatch for the property learner");
    }
  }
  PplCache cache;
  return ppl_forward_cached(trajectories, params, cache);
}

// ---------------------------------------------------------------------------
// Dynamics forward / backward
// ---------------------------------------------------------------------------

namespace {

struct DynCache {
  int n = 0;
  static constexpr int D = DynParams::kObjDim;
  std::vector<std::vector<double>> o0;
  std::vector<std::vector<double>> h0_pre, h0;  // per ordered pair i*n+j
  std::vector<std::vector<double>> agg0;
  std::vector<std::vector<double>> o1;
  std::vector<std::vector<double>> h1_pre, h1;
  std::vector<std::vector<double>> agg1;
  std::vector<std::vector<double>> o2;
};

std::vector<std::array<double, 4>> dyn_forward_cached(const DynInput& in,
                                                      const DynParams& p,
                                                      DynCache& c) {
  const int n = static_cast<int>(in.window.size());
  constexpr int D = DynParams::kObjDim;
  c.n = n;
  c.o0.assign(static_cast<std::size_t>(n), {});
  for (int i = 0; i < n; ++i) {
    c.o0[static_cast<std::size_t>(i)].assign(
        in.window[static_cast<std::size_t>(i)].begin(),
        in.window[static_cast<std::size_t>(i)].end());
  }
  auto gate_of = [&](int i, int j) {
    return in.gate.at({i, j});
  };

  c.h0_pre.assign(static_cast<std::size_t>(n) * n, {});
  c.h0.assign(static_cast<std::size_t>(n) * n, {});
  c.agg0.assign(static_cast<std::size_t>(n),
                std::vector<double>(static_cast<std::size_t>(p.hidden), 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto idx = static_cast<std::size_t>(i * n + j);
      const auto& emb = p.g_emb[static_cast<std::size_t>(gate_of(i, j))];
      c.h0_pre[idx] = emb.apply(concat(c.o0[static_cast<std::size_t>(i)],
                                       c.o0[static_cast<std::size_t>(j)]));
      c.h0[idx] = relu(c.h0_pre[idx]);
      for (int h = 0; h < p.hidden; ++h) {
        c.agg0[static_cast<std::size_t>(j)][static_cast<std::size_t>(h)] +=
            c.h0[idx][static_cast<std::size_t>(h)];
      }
    }
  }
  c.o1.assign(static_cast<std::size_t>(n), {});
  for (int j = 0; j < n; ++j) {
    auto delta = p.g_rel[0].apply(c.agg0[static_cast<std::size_t>(j)]);
    c.o1[static_cast<std::size_t>(j)] = c.o0[static_cast<std::size_t>(j)];
    for (int d = 0; d < D; ++d) {
      c.o1[static_cast<std::size_t>(j)][static_cast<std::size_t>(d)] +=
          delta[static_cast<std::size_t>(d)];
    }
  }

  c.h1_pre.assign(static_cast<std::size_t>(n) * n, {});
  c.h1.assign(static_cast<std::size_t>(n) * n, {});
  c.agg1.assign(static_cast<std::size_t>(n),
                std::vector<double>(static_cast<std::size_t>(p.hidden), 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto idx = static_cast<std::size_t>(i * n + j);
      const auto& enc = p.g_enc[static_cast<std::size_t>(gate_of(i, j))];
      const auto cat =
          concat(concat(c.o1[static_cast<std::size_t>(i)],
                        c.o0[static_cast<std::size_t>(i)]),
                 concat(c.o1[static_cast<std::size_t>(j)],
                        c.o0[static_cast<std::size_t>(j)]));
      c.h1_pre[idx] = enc.apply(cat);
      c.h1[idx] = relu(c.h1_pre[idx]);
      for (int h = 0; h < p.hidden; ++h) {
        c.agg1[static_cast<std::size_t>(j)][static_cast<std::size_t>(h)] +=
            c.h1[idx][static_cast<std::size_t>(h)];
      }
    }
  }
  c.o2.assign(static_cast<std::size_t>(n), {});
  std::vector<std::array<double, 4>> out(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    auto delta = p.g_rel[1].apply(c.agg1[static_cast<std::size_t>(j)]);
    c.o2[static_cast<std::size_t>(j)] = c.o1[static_cast<std::size_t>(j)];
    for (int d = 0; d < D; ++d) {
      c.o2[static_cast<std::size_t>(j)][static_cast<std::size_t>(d)] +=
          delta[static_cast<std::size_t>(d)];
    }
    const auto y = p.g_pred.apply(c.o2[static_cast<std::size_t>(j)]);
    out[static_cast<std::size_t>(j)] = {y[0], y[1], y[2], y[3]};
  }
  return out;
}

double dyn_loss_grad(const DynInput& in,
                     const std::vector<std::array<double, 4>>& targets,
                     const DynParams& p, DynParams* grads) {
  DynCache c;
  const auto pred = dyn_forward_cached(in, p, c);
  const int n = c.n;
  constexpr int D = DynParams::kObjDim;

  double loss = 0.0;
  std::vector<std::vector<double>> dpred(static_cast<std::size_t>(n),
                                         std::vector<double>(4, 0.0));
  const double denom = 4.0 * n;
  for (int j = 0; j < n; ++j) {
    for (int d = 0; d < 4; ++d) {
      const double err = pred[static_cast<std::size_t>(j)][static_cast<std::size_t>(d)] -
                         targets[static_cast<std::size_t>(j)][static_cast<std::size_t>(d)];
      loss += err * err / denom;
      dpred[static_cast<std::size_t>(j)][static_cast<std::size_t>(d)] =
          2.0 * err / denom;
    }
  }
  if (!grads) return loss;

  auto gate_of = [&](int i, int j) { return in.gate.at({i, j}); };
  const std::size_t H = static_cast<std::size_t>(p.hidden);

  std::vector<std::vector<double>> do2(static_cast<std::size_t>(n),
                                       std::vector<double>(D, 0.0));
  for (int j = 0; j < n; ++j) {
    linear_backward(p.g_pred, grads->g_pred, c.o2[static_cast<std::size_t>(j)],
                    dpred[static_cast<std::size_t>(j)],
                    &do2[static_cast<std::size_t>(j)]);
  }

  // o2 = o1 + g_rel1(agg1)
  std::vector<std::vector<double>> do1(static_cast<std::size_t>(n),
                                       std::vector<double>(D, 0.0));
  std::vector<std::vector<double>> dagg1(static_cast<std::size_t>(n),
                                         std::vector<double>(H, 0.0));
  for (int j = 0; j < n; ++j) {
    linear_backward(p.g_rel[1], grads->g_rel[1], c.agg1[static_cast<std::size_t>(j)],
                    do2[static_cast<std::size_t>(j)],
                    &dagg1[static_cast<std::size_t>(j)]);
    for (int d = 0; d < D; ++d) {
      do1[static_cast<std::size_t>(j)][static_cast<std::size_t>(d)] +=
          do2[static_cast<std::size_t>(j)][static_cast<std::size_t>(d)];
    }
  }

  // h1 paths feed both o1 and o0
  std::vector<std::vector<double>> do0(static_cast<std::size_t>(n),
                                       std::vector<double>(D, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto idx = static_cast<std::size_t>(i * n + j);
      const auto dh1 =
          relu_backward(c.h1_pre[idx], dagg1[static_cast<std::size_t>(j)]);
      const int k = gate_of(i, j);
      const auto cat =
          concat(concat(c.o1[static_cast<std::size_t>(i)],
                        c.o0[static_cast<std::size_t>(i)]),
                 concat(c.o1[static_cast<std::size_t>(j)],
                        c.o0[static_cast<std::size_t>(j)]));
      std::vector<double> dcat(4 * D, 0.0);
      linear_backward(p.g_enc[static_cast<std::size_t>(k)],
                      grads->g_enc[static_cast<std::size_t>(k)], cat, dh1, &dcat);
      for (int d = 0; d < D; ++d) {
        do1[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)] +=
            dcat[static_cast<std::size_t>(d)];
        do0[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)] +=
            dcat[static_cast<std::size_t>(D + d)];
        do1[static_cast<std::size_t>(j)][static_cast<std::size_t>(d)] +=
            dcat[static_cast<std::size_t>(2 * D + d)];
        do0[static_cast<std::size_t>(j)][static_cast<std::size_t>(d)] +=
            dcat[static_cast<std::size_t>(3 * D + d)];
      }
    }
  }

  // o1 = o0 + g_rel0(agg0)
  std::vector<std::vector<double>> dagg0(static_cast<std::size_t>(n),
                                         std::vector<double>(H, 0.0));
  for (int j = 0; j < n; ++j) {
    linear_backward(p.g_rel[0], grads->g_rel[0], c.agg0[static_cast<std::size_t>(j)],
                    do1[static_cast<std::size_t>(j)],
                    &dagg0[static_cast<std::size_t>(j)]);
    for (int d = 0; d < D; ++d) {
      do0[static_cast<std::size_t>(j)][static_cast<std::size_t>(d)] +=
          do1[static_cast<std::size_t>(j)][static_cast<std::size_t>(d)];
    }
  }

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto idx = static_cast<std::size_t>(i * n + j);
      const auto dh0 =
          relu_backward(c.h0_pre[idx], dagg0[static_cast<std::size_t>(j)]);
      const int k = gate_of(i, j);
      const auto cat = concat(c.o0[static_cast<std::size_t>(i)],
                              c.o0[static_cast<std::size_t>(j)]);
      std::vector<double> dcat(2 * D, 0.0);
      linear_backward(p.g_emb[static_cast<std::size_t>(k)],
                      grads->g_emb[static_cast<std::size_t>(k)], cat, dh0, &dcat);
      // input gradients stop here
      (void)dcat;
    }
  }
  return loss;
}

}  // namespace

std::vector<std::array<double, 4>> dyn_forward(const DynInput& input,
                                               const DynParams& params) {
  for (const auto& [key, k] : input.gate) {
    if (k < 0 || k > 2) throw SimError("gate vector is not one-hot");
  }
  DynCache cache;
  return dyn_forward_cached(input, params, cache);
}

// ---------------------------------------------------------------------------
// Data preparation
// ---------------------------------------------------------------------------

std::vector<double> resample_trajectory(const SceneRecord& rec, int object_id,
                                        int t_frames, double half_extent) {
  const int idx = rec.index_of(object_id);
  if (idx < 0) throw SimError("object not in record");
  const int n = rec.frame_count();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(2 * t_frames));
  for (int k = 0; k < t_frames; ++k) {
    const double pos = t_frames > 1
                           ? static_cast<double>(k) * (n - 1) / (t_frames - 1)
                           : 0.0;
    const int lo = std::min(static_cast<int>(pos), n - 1);
    const int hi = std::min(lo + 1, n - 1);
    const double frac = pos - lo;
    const Vec2 a = rec.frames[static_cast<std::size_t>(lo)][static_cast<std::size_t>(idx)].position;
    const Vec2 b = rec.frames[static_cast<std::size_t>(hi)][static_cast<std::size_t>(idx)].position;
    const Vec2 p = a * (1.0 - frac) + b * frac;
    out.push_back(p.x / half_extent);
    out.push_back(p.y / half_extent);
  }
  return out;
}

namespace {

struct PplSample {
  std::vector<std::vector<double>> trajs;
  std::vector<int> mass_targets;
  std::map<std::pair<int, int>, int> edge_targets;
};

PplSample make_ppl_sample(const SceneRecord& rec,
                          const std::vector<ObjectSpec>& roster, int t_frames,
                          double half_extent) {
  PplSample s;
  for (std::size_t i = 0; i < rec.objects.size(); ++i) {
    s.trajs.push_back(
        resample_trajectory(rec, rec.objects[i].id, t_frames, half_extent));
    const ObjectSpec* truth = nullptr;
    for (const auto& o : roster) {
      if (o.id == rec.objects[i].id) truth = &o;
    }
    s.mass_targets.push_back(truth->mass == MassLevel::heavy ? 1 : 0);
  }
  for (std::size_t i = 0; i < rec.objects.size(); ++i) {
    for (std::size_t j = 0; j < rec.objects.size(); ++j) {
      if (i == j) continue;
      const ObjectSpec* a = nullptr;
      const ObjectSpec* b = nullptr;
      for (const auto& o : roster) {
        if (o.id == rec.objects[i].id) a = &o;
        if (o.id == rec.objects[j].id) b = &o;
      }
      const double qq = charge_value(a->charge) * charge_value(b->charge);
      const int target = qq > 0 ? 0 : qq < 0 ? 1 : 2;
      s.edge_targets[{static_cast<int>(i), static_cast<int>(j)}] = target;
    }
  }
  return s;
}

std::array<double, DynParams::kObjDim> dyn_features(
    const SceneRecord& rec, int obj_index, int t, double half_extent,
    MassLevel mass) {
  std::array<double, DynParams::kObjDim> f{};
  int w = 0;
  for (int dt = DynParams::kHistory - 1; dt >= 0; --dt) {
    const auto& st = rec.frames[static_cast<std::size_t>(t - dt)]
                               [static_cast<std::size_t>(obj_index)];
    f[static_cast<std::size_t>(w * 5 + 0)] = st.position.x / half_extent;
    f[static_cast<std::size_t>(w * 5 + 1)] = st.position.y / half_extent;
    f[static_cast<std::size_t>(w * 5 + 2)] = st.radius / half_extent;
    f[static_cast<std::size_t>(w * 5 + 3)] = st.radius / half_extent;
    f[static_cast<std::size_t>(w * 5 + 4)] = mass == MassLevel::heavy ? 1.0 : 0.0;
    ++w;
  }
  return f;
}

struct DynSample {
  DynInput input;
  std::vector<std::array<double, 4>> targets;
};

std::vector<DynSample> make_dyn_samples(const SceneRecord& rec,
                                        const std::vector<ObjectSpec>& roster,
                                        double half_extent, int stride) {
  std::vector<DynSample> out;
  const int n = static_cast<int>(rec.objects.size());
  auto truth_of = [&](int id) -> const ObjectSpec& {
    for (const auto& o : roster) {
      if (o.id == id) return o;
    }
    throw SimError("object not in roster");
  };
  for (int t = DynParams::kHistory - 1; t + 1 < rec.frame_count(); t += stride) {
    DynSample s;
    for (int i = 0; i < n; ++i) {
      const auto& spec = truth_of(rec.objects[static_cast<std::size_t>(i)].id);
      s.input.window.push_back(
          dyn_features(rec, i, t, half_extent, spec.mass));
      const auto& next = rec.frames[static_cast<std::size_t>(t + 1)]
                                   [static_cast<std::size_t>(i)];
      s.targets.push_back({next.position.x / half_extent,
                           next.position.y / half_extent,
                           next.radius / half_extent,
                           next.radius / half_extent});
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const auto& a = truth_of(rec.objects[static_cast<std::size_t>(i)].id);
        const auto& b = truth_of(rec.objects[static_cast<std::size_t>(j)].id);
        const double qq = charge_value(a.charge) * charge_value(b.charge);
        const ChargeRel rel = qq > 0   ? ChargeRel::same
                              : qq < 0 ? ChargeRel::opposite
                                       : ChargeRel::none;
        s.input.gate[{i, j}] = gate_index(rel);
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

template <typename Params>
void sgd_update(Params& params, Params& grads, double lr, double scale) {
  for_each_block(params, [&](const std::string&, Linear& l) { (void)l; });
  // paired walk over parameter and gradient blocks
  std::vector<Linear*> param_blocks, grad_blocks;
  for_each_block(params, [&](const std::string&, Linear& l) {
    param_blocks.push_back(&l);
  });
  for_each_block(grads, [&](const std::string&, Linear& l) {
    grad_blocks.push_back(&l);
  });
  for (std::size_t k = 0; k < param_blocks.size(); ++k) {
    for (std::size_t i = 0; i < param_blocks[k]->w.size(); ++i) {
      param_blocks[k]->w[i] -= lr * grad_blocks[k]->w[i] * scale;
      grad_blocks[k]->w[i] = 0.0;
    }
    for (std::size_t i = 0; i < param_blocks[k]->b.size(); ++i) {
      param_blocks[k]->b[i] -= lr * grad_blocks[k]->b[i] * scale;
      grad_blocks[k]->b[i] = 0.0;
    }
  }
}

PPLParams zero_like(const PPLParams& p) {
  PPLParams g = p;
  for_each_block(g, [](const std::string&, Linear& l) {
    std::fill(l.w.begin(), l.w.end(), 0.0);
    std::fill(l.b.begin(), l.b.end(), 0.0);
  });
  return g;
}

DynParams zero_like(const DynParams& p) {
  DynParams g = p;
  for_each_block(g, [](const std::string&, Linear& l) {
    std::fill(l.w.begin(), l.w.end(), 0.0);
    std::fill(l.b.begin(), l.b.end(), 0.0);
  });
  return g;
}

std::vector<double> cumulative_mean(const std::vector<double>& raw) {
  std::vector<double> out;
  double sum = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    sum += raw[i];
    out.push_back(sum / static_cast<double>(i + 1));
  }
  return out;
}

}  // namespace

GnnBundle train(const std::vector<VideoSet>& corpus, const PhysicsConfig& phys,
                const GnnTrainConfig& cfg) {
  RngStream rng(cfg.seed);
  GnnBundle bundle;
  bundle.ppl.init(cfg.t_frames, cfg.hidden, rng);
  bundle.dyn.init(cfg.hidden, rng);

  // datasets
  std::vector<PplSample> ppl_data;
  std::vector<DynSample> dyn_data;
  for (const auto& set : corpus) {
    std::vector<const SceneRecord*> records = {&set.target};
    for (const auto& ref : set.references) records.push_back(&ref);
    for (const auto* rec : records) {
      ppl_data.push_back(make_ppl_sample(*rec, set.roster, cfg.t_frames,
                                         phys.arena_half_extent));
      for (auto& s : make_dyn_samples(*rec, set.roster, phys.arena_half_extent,
                                      cfg.dyn_window_stride)) {
        dyn_data.push_back(std::move(s));
      }
    }
  }
  if (ppl_data.empty() || dyn_data.empty()) {
    throw SimError("training corpus is empty");
  }

  // property learner
  {
    PPLParams grads = zero_like(bundle.ppl);
    std::vector<std::size_t> order(ppl_data.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (int epoch = 0; epoch < cfg.ppl_epochs; ++epoch) {
      rng.shuffle(order);
      double epoch_loss = 0.0;
      int in_batch = 0;
      for (std::size_t k = 0; k < order.size(); ++k) {
        const auto& s = ppl_data[order[k]];
        epoch_loss += ppl_loss_grad(s.trajs, s.mass_targets, s.edge_targets,
                                    bundle.ppl, &grads);
        if (!std::isfinite(epoch_loss)) {
          throw SimError("property learner loss diverged at epoch " +
                         std::to_string(epoch));
        }
        if (++in_batch == cfg.batch || k + 1 == order.size()) {
          sgd_update(bundle.ppl, grads, cfg.lr, 1.0 / in_batch);
          in_batch = 0;
        }
      }
      bundle.ppl_loss.raw.push_back(epoch_loss /
                                    static_cast<double>(order.size()));
    }
    bundle.ppl_loss.smoothed = cumulative_mean(bundle.ppl_loss.raw);
  }

  // dynamics predictor
  {
    DynParams grads = zero_like(bundle.dyn);
    std::vector<std::size_t> order(dyn_data.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (int epoch = 0; epoch < cfg.dyn_epochs; ++epoch) {
      rng.shuffle(order);
      double epoch_loss = 0.0;
      int in_batch = 0;
      for (std::size_t k = 0; k < order.size(); ++k) {
        const auto& s = dyn_data[order[k]];
        epoch_loss += dyn_loss_grad(s.input, s.targets, bundle.dyn, &grads);
        if (!std::isfinite(epoch_loss)) {
          throw SimError("dynamics loss diverged at epoch " +
                         std::to_string(epoch));
        }
        if (++in_batch == cfg.batch || k + 1 == order.size()) {
          sgd_update(bundle.dyn, grads, cfg.lr, 1.0 / in_batch);
          in_batch = 0;
        }
      }
      bundle.dyn_loss.raw.push_back(epoch_loss /
                                    static_cast<double>(order.size()));
    }
    bundle.dyn_loss.smoothed = cumulative_mean(bundle.dyn_loss.raw);
  }
  return bundle;
}

// ---------------------------------------------------------------------------
// Prediction and evaluation
// ---------------------------------------------------------------------------

PropertyGraph ppl_predict_video(const SceneRecord& rec, const PPLParams& params,
                                double half_extent) {
  std::vector<std::vector<double>> trajs;
  for (const auto& o : rec.objects) {
    trajs.push_back(
        resample_trajectory(rec, o.id, params.t_frames, half_extent));
  }
  const PPLOutput out = ppl_forward(trajs, params);

  PropertyGraph g;
  for (std::size_t i = 0; i < rec.objects.size(); ++i) {
    const auto p = softmax(out.mass_logits[i]);
    const bool heavy = p[1] > p[0];
    g.node_mass[rec.objects[i].id] = {heavy ? MassLevel::heavy : MassLevel::light,
                                      std::max(p[0], p[1])};
  }
  for (std::size_t i = 0; i < rec.objects.size(); ++i) {
    for (std::size_t j = i + 1; j < rec.objects.size(); ++j) {
      // both directions pool into one symmetric prediction
      const auto& lij = out.edge_logits.at({static_cast<int>(i), static_cast<int>(j)});
      const auto& lji = out.edge_logits.at({static_cast<int>(j), static_cast<int>(i)});
      std::array<double, 3> sum = {lij[0] + lji[0], lij[1] + lji[1],
                                   lij[2] + lji[2]};
      const auto p = softmax(sum);
      int best = 0;
      for (int k = 1; k < 3; ++k) {
        if (p[static_cast<std::size_t>(k)] > p[static_cast<std::size_t>(best)]) {
          best = k;
        }
      }
      const ChargeRel rel = best == 0   ? ChargeRel::same
                            : best == 1 ? ChargeRel::opposite
                                        : ChargeRel::none;
      g.edge_charge[ordered_pair(rec.objects[i].id, rec.objects[j].id)] = {
          rel, p[static_cast<std::size_t>(best)]};
    }
  }
  return g;
}

PropertyGraph ppl_predict_set(const VideoSet& set, const PPLParams& params,
                              double half_extent) {
  std::vector<PropertyGraph> partials;
  partials.push_back(ppl_predict_video(set.target, params, half_extent));
  for (const auto& ref : set.references) {
    partials.push_back(ppl_predict_video(ref, params, half_extent));
  }
  PropertyGraph fused;
  // max-pooling over nodes and edges across the per-video subgraphs
  for (const auto& partial : partials) {
    for (const auto& [id, label] : partial.node_mass) {
      auto it = fused.node_mass.find(id);
      if (it == fused.node_mass.end() || label.confidence > it->second.confidence) {
        fused.node_mass[id] = label;
      }
    }
    for (const auto& [key, edge] : partial.edge_charge) {
      auto it = fused.edge_charge.find(key);
      if (it == fused.edge_charge.end() ||
          edge.confidence > it->second.confidence) {
        fused.edge_charge[key] = edge;
      }
    }
  }
  return fused;
}

PplEval evaluate_ppl(const std::vector<VideoSet>& corpus,
                     const PPLParams& params, double half_extent) {
  PplEval eval;
  int mass_hits = 0, edge_hits = 0;
  for (const auto& set : corpus) {
    const PropertyGraph predicted = ppl_predict_set(set, params, half_extent);
    for (const auto& o : set.roster) {
      ++eval.nodes;
      auto it = predicted.node_mass.find(o.id);
      if (it != predicted.node_mass.end() && it->second.mass == o.mass) {
        ++mass_hits;
      }
    }
    for (std::size_t i = 0; i < set.roster.size(); ++i) {
      for (std::size_t j = i + 1; j < set.roster.size(); ++j) {
        ++eval.edges;
        const double qq = charge_value(set.roster[i].charge) *
                          charge_value(set.roster[j].charge);
        const ChargeRel truth = qq > 0   ? ChargeRel::same
                                : qq < 0 ? ChargeRel::opposite
                                         : ChargeRel::none;
        auto it = predicted.edge_charge.find(
            ordered_pair(set.roster[i].id, set.roster[j].id));
        if (it != predicted.edge_charge.end() && it->second.rel == truth) {
          ++edge_hits;
        }
      }
    }
  }
  eval.mass_accuracy = eval.nodes ? static_cast<double>(mass_hits) / eval.nodes : 0.0;
  eval.edge_accuracy = eval.edges ? static_cast<double>(edge_hits) / eval.edges : 0.0;
  return eval;
}

std::vector<std::vector<BodyState>> rollout(
    const std::vector<std::vector<BodyState>>& seed_frames,
    const std::vector<ObjectSpec>& cast,
    const std::map<int, MassLevel>& mass_labels,
    const std::map<std::pair<int, int>, ChargeRel>& relations,
    const DynParams& params, int n_steps, const PhysicsConfig& phys) {
  if (static_cast<int>(seed_frames.size()) < DynParams::kHistory) {
    throw SimError("rollout needs a full history window");
  }
  const int n = static_cast<int>(cast.size());
  const double he = phys.arena_half_extent;
  std::vector<std::vector<BodyState>> window(
      seed_frames.end() - DynParams::kHistory, seed_frames.end());

  DynInput input;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      auto it = relations.find(ordered_pair(cast[static_cast<std::size_t>(i)].id,
                                            cast[static_cast<std::size_t>(j)].id));
      input.gate[{i, j}] =
          gate_index(it != relations.end() ? it->second : ChargeRel::none);
    }
  }

  std::vector<std::vector<BodyState>> out;
  for (int step = 0; step < n_steps; ++step) {
    input.window.clear();
    for (int i = 0; i < n; ++i) {
      std::array<double, DynParams::kObjDim> f{};
      auto mass_it = mass_labels.find(cast[static_cast<std::size_t>(i)].id);
      const double m =
          (mass_it != mass_labels.end() && mass_it->second == MassLevel::heavy)
              ? 1.0
              : 0.0;
      for (int w = 0; w < DynParams::kHistory; ++w) {
        const auto& st = window[static_cast<std::size_t>(w)]
                               [static_cast<std::size_t>(i)];
        f[static_cast<std::size_t>(w * 5 + 0)] = st.position.x / he;
        f[static_cast<std::size_t>(w * 5 + 1)] = st.position.y / he;
        f[static_cast<std::size_t>(w * 5 + 2)] = st.radius / he;
        f[static_cast<std::size_t>(w * 5 + 3)] = st.radius / he;
        f[static_cast<std::size_t>(w * 5 + 4)] = m;
      }
      input.window.push_back(f);
    }
    const auto pred = dyn_forward(input, params);

    std::vector<BodyState> frame(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const auto& prev = window.back()[static_cast<std::size_t>(i)];
      BodyState st;
      st.position = {pred[static_cast<std::size_t>(i)][0] * he,
                     pred[static_cast<std::size_t>(i)][1] * he};
      st.velocity = (st.position - prev.position) * static_cast<double>(phys.record_fps);
      st.radius = prev.radius;
      if (!st.finite()) {
        throw SimError("rollout diverged at step " + std::to_string(step));
      }
      frame[static_cast<std::size_t>(i)] = st;
    }
    out.push_back(frame);
    window.erase(window.begin());
    window.push_back(frame);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gradient checking
// ---------------------------------------------------------------------------

std::map<std::string, double> check_gradients(std::uint64_t seed) {
  RngStream rng(seed);
  std::map<std::string, double> out;

  auto check_blocks = [&](auto& params, auto& grads, auto loss_fn,
                          const std::string& prefix) {
    using ParamsT = std::decay_t<decltype(params)>;
    ParamsT& analytic = grads;
    std::vector<std::pair<std::string, Linear*>> pblocks, gblocks;
    for_each_block(params, [&](const std::string& name, Linear& l) {
      pblocks.push_back({name, &l});
    });
    for_each_block(analytic, [&](const std::string& name, Linear& l) {
      gblocks.push_back({name, &l});
    });
    for (std::size_t k = 0; k < pblocks.size(); ++k) {
      double worst = 0.0;
      auto probe = [&](std::vector<double>& pw, std::vector<double>& gw) {
        const std::size_t count = std::min<std::size_t>(10, pw.size());
        for (std::size_t c = 0; c < count; ++c) {
          const std::size_t i =
              pw.size() <= 10
                  ? c
                  : static_cast<std::size_t>(rng.uniform_int(
                        0, static_cast<int>(pw.size()) - 1));
          const double keep = pw[i];
          const double h = 1e-6 * std::max(1.0, std::abs(keep));
          pw[i] = keep + h;
          const double up = loss_fn();
          pw[i] = keep - h;
          const double down = loss_fn();
          pw[i] = keep;
          const double numeric = (up - down) / (2 * h);
          const double rel = std::abs(numeric - gw[i]) /
                             std::max({std::abs(numeric), std::abs(gw[i]), 1e-6});
          worst = std::max(worst, rel);
        }
      };
      probe(pblocks[k].second->w, gblocks[k].second->w);
      probe(pblocks[k].second->b, gblocks[k].second->b);
      out[prefix + pblocks[k].first] = worst;
    }
  };

  // small synthetic property-learner problem
  {
    PPLParams params;
    params.init(6, 8, rng);
    const int n = 3;
    std::vector<std::vector<double>> trajs;
    for (int i = 0; i < n; ++i) {
      std::vector<double> t;
      for (int k = 0; k < 12; ++k) t.push_back(rng.uniform(-1.0, 1.0));
      trajs.push_back(std::move(t));
    }
    std::vector<int> mass_targets = {0, 1, 0};
    std::map<std::pair<int, int>, int> edge_targets;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j) edge_targets[{i, j}] = (i + j) % 3;
      }
    }
    PPLParams grads = zero_like(params);
    ppl_loss_grad(trajs, mass_targets, edge_targets, params, &grads);
    check_blocks(params, grads, [&]() {
      return ppl_loss_grad(trajs, mass_targets, edge_targets, params, nullptr);
    }, "ppl.");
  }

  // small synthetic dynamics problem; the zero-opened residual blocks get
  // re-randomized so every block sits at a non-degenerate point
  {
    DynParams params;
    params.init(8, rng);
    for (auto& l : params.g_rel) {
      for (auto& w : l.w) w = rng.uniform(-0.3, 0.3);
      for (auto& b : l.b) b = rng.uniform(-0.1, 0.1);
    }
    for (auto& w : params.g_pred.w) w += rng.uniform(-0.3, 0.3);
    const int n = 3;
    DynInput input;
    for (int i = 0; i < n; ++i) {
      std::array<double, DynParams::kObjDim> f{};
      for (auto& v : f) v = rng.uniform(-1.0, 1.0);
      input.window.push_back(f);
    }
    int g = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j) input.gate[{i, j}] = (g++) % 3;
      }
    }
    std::vector<std::array<double, 4>> targets;
    for (int i = 0; i < n; ++i) {
      targets.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                         rng.uniform(0.0, 0.2), rng.uniform(0.0, 0.2)});
    }
    DynParams grads = zero_like(params);
    dyn_loss_grad(input, targets, params, &grads);
    check_blocks(params, grads, [&]() {
      return dyn_loss_grad(input, targets, params, nullptr);
    }, "dyn.");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

namespace {

nlohmann::json linear_to_json(const Linear& l) {
  return nlohmann::json{{"in", l.in}, {"out", l.out}, {"w", l.w}, {"b", l.b}};
}

Linear linear_from_json(const nlohmann::json& j) {
  Linear l;
  l.in = j.at("in").get<int>();
  l.out = j.at("out").get<int>();
  l.w = j.at("w").get<std::vector<double>>();
  l.b = j.at("b").get<std::vector<double>>();
  if (l.w.size() != static_cast<std::size_t>(l.in) * l.out ||
      l.b.size() != static_cast<std::size_t>(l.out)) {
    throw SimError("checkpoint block shape mismatch");
  }
  return l;
}

}  // namespace

nlohmann::json checkpoint_to_json(const GnnBundle& bundle) {
  nlohmann::json ppl = nlohmann::json::object();
  nlohmann::json dyn = nlohmann::json::object();
  auto& b = const_cast<GnnBundle&>(bundle);
  for_each_block(b.ppl, [&](const std::string& name, Linear& l) {
    ppl[name] = linear_to_json(l);
  });
  for_each_block(b.dyn, [&](const std::string& name, Linear& l) {
    dyn[name] = linear_to_json(l);
  });
  return nlohmann::json{{"t_frames", bundle.ppl.t_frames},
                        {"hidden", bundle.ppl.hidden},
                        {"ppl", ppl},
                        {"dyn", dyn},
                        {"ppl_loss", bundle.ppl_loss.raw},
                        {"ppl_loss_smoothed", bundle.ppl_loss.smoothed},
                        {"dyn_loss", bundle.dyn_loss.raw},
                        {"dyn_loss_smoothed", bundle.dyn_loss.smoothed}};
}

GnnBundle checkpoint_from_json(const nlohmann::json& j) {
  GnnBundle bundle;
  bundle.ppl.t_frames = j.at("t_frames").get<int>();
  bundle.ppl.hidden = j.at("hidden").get<int>();
  bundle.dyn.hidden = bundle.ppl.hidden;
  for_each_block(bundle.ppl, [&](const std::string& name, Linear& l) {
    l = linear_from_json(j.at("ppl").at(name));
  });
  for_each_block(bundle.dyn, [&](const std::string& name, Linear& l) {
    l = linear_from_json(j.at("dyn").at(name));
  });
  bundle.ppl_loss.raw = j.value("ppl_loss", std::vector<double>{});
  bundle.ppl_loss.smoothed = j.value("ppl_loss_smoothed", std::vector<double>{});
  bundle.dyn_loss.raw = j.value("dyn_loss", std::vector<double>{});
  bundle.dyn_loss.smoothed = j.value("dyn_loss_smoothed", std::vector<double>{});
  return bundle;
}

}  // namespace physq::gnn
