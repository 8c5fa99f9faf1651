#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "physq/physics.hpp"
#include "physq/rng.hpp"
#include "physq/types.hpp"

namespace physq::gnn {

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

struct Linear {
  int in = 0, out = 0;
  std::vector<double> w;  // row-major out x in
  std::vector<double> b;

  void init(int in_, int out_, RngStream& rng);
  void zero(int in_, int out_);
  std::vector<double> apply(const std::vector<double>& x) const;
};

// Property learner: two message-passing rounds over per-object trajectory
// embeddings; mass head reads the final node state, charge head the last
// edge state.
struct PPLParams {
  int t_frames = 50;
  int hidden = 64;
  Linear f_emb;               // 2T -> H
  std::array<Linear, 2> f_rel;  // [v_i; v_j] (2H) -> H
  std::array<Linear, 2> f_enc;  // H -> H
  Linear f_v_pred;            // H -> 2 (light, heavy)
  Linear f_e_pred;            // H -> 3 (same, opposite, none)

  void init(int t_frames_, int hidden_, RngStream& rng);
};

// Dynamics predictor: per-pair messages gated by the relative-charge class,
// residual node updates, one-layer head predicting next (x, y, w, h).
struct DynParams {
  static constexpr int kHistory = 3;
  static constexpr int kObjDim = 15;  // 3 frames x (x, y, w, h, m)
  int hidden = 64;
  std::array<Linear, 3> g_emb;  // 2*kObjDim -> H, gate order: same/opposite/none
  std::array<Linear, 2> g_rel;  // H -> kObjDim, linear output
  std::array<Linear, 3> g_enc;  // 4*kObjDim -> H
  Linear g_pred;                // kObjDim -> 4

  void init(int hidden_, RngStream& rng);
};

int gate_index(ChargeRel rel);  // same 0, opposite 1, none 2

// named views over every parameter block, for updates and gradient checks
void for_each_block(PPLParams& p,
                    const std::function<void(const std::string&, Linear&)>& fn);
void for_each_block(DynParams& p,
                    const std::function<void(const std::string&, Linear&)>& fn);

// ---------------------------------------------------------------------------
// Forward passes
// ---------------------------------------------------------------------------

struct PPLOutput {
  std::vector<std::array<double, 2>> mass_logits;           // per node
  std::map<std::pair<int, int>, std::array<double, 3>> edge_logits;  // ordered
};

// trajectories: one row of 2*t_frames normalized coordinates per object
PPLOutput ppl_forward(const std::vector<std::vector<double>>& trajectories,
                      const PPLParams& params);

// window: per object, kHistory frames of normalized (x, y, w, h, m);
// gates: per ordered pair, one-hot relative-charge class
struct DynInput {
  std::vector<std::array<double, DynParams::kObjDim>> window;
  std::map<std::pair<int, int>, int> gate;  // ordered pair -> class index
};

std::vector<std::array<double, 4>> dyn_forward(const DynInput& input,
                                               const DynParams& params);

// resampled, arena-normalized trajectory for one object of a record
std::vector<double> resample_trajectory(const SceneRecord& rec, int object_id,
                                        int t_frames, double half_extent);

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

struct GnnTrainConfig {
  int ppl_epochs = 60;
  int dyn_epochs = 15;
  double lr = 1e-3;
  int batch = 8;
  int t_frames = 50;
  int hidden = 64;
  int dyn_window_stride = 5;
  std::uint64_t seed = 1;
};

struct LossCurve {
  std::vector<double> raw;       // mean loss per epoch
  std::vector<double> smoothed;  // cumulative mean
};

struct GnnBundle {
  PPLParams ppl;
  DynParams dyn;
  LossCurve ppl_loss;
  LossCurve dyn_loss;
};

GnnBundle train(const std::vector<VideoSet>& corpus, const PhysicsConfig& phys,
                const GnnTrainConfig& cfg);

// held-out accuracy of the fused per-set property predictions
struct PplEval {
  double mass_accuracy = 0.0;
  double edge_accuracy = 0.0;
  int nodes = 0;
  int edges = 0;
};

PropertyGraph ppl_predict_video(const SceneRecord& rec, const PPLParams& params,
                                double half_extent);
PropertyGraph ppl_predict_set(const VideoSet& set, const PPLParams& params,
                              double half_extent);
PplEval evaluate_ppl(const std::vector<VideoSet>& corpus,
                     const PPLParams& params, double half_extent);

// autoregressive rollout; returns n_steps predicted frames continuing the
// given seed window (most recent frame last)
std::vector<std::vector<BodyState>> rollout(
    const std::vector<std::vector<BodyState>>& seed_frames,
    const std::vector<ObjectSpec>& cast,
    const std::map<int, MassLevel>& mass_labels,
    const std::map<std::pair<int, int>, ChargeRel>& relations,
    const DynParams& params, int n_steps, const PhysicsConfig& phys);

// ---------------------------------------------------------------------------
// Gradient checking and checkpoints
// ---------------------------------------------------------------------------

// max relative error between analytic and central-difference gradients,
// per parameter block, on a small synthetic problem
std::map<std::string, double> check_gradients(std::uint64_t seed);

nlohmann::json checkpoint_to_json(const GnnBundle& bundle);
GnnBundle checkpoint_from_json(const nlohmann::json& j);

}  // namespace physq::gnn
