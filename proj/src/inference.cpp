#include "physq/inference.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace physq {

int Hypothesis::n_heavy() const {
  return static_cast<int>(
      std::count(mass.begin(), mass.end(), MassLevel::heavy));
}

int Hypothesis::n_charged() const {
  int n = 0;
  for (auto c : charge) {
    if (c != ChargeSign::neutral) ++n;
  }
  return n;
}

std::string Hypothesis::signature() const {
  std::ostringstream os;
  for (auto m : mass) os << (m == MassLevel::heavy ? 'H' : 'L');
  os << '|';
  for (auto c : charge) {
    os << (c == ChargeSign::positive ? '+'
           : c == ChargeSign::negative ? '-'
                                       : '0');
  }
  return os.str();
}

std::vector<Hypothesis> enumerate_hypotheses(int n_objects) {
  const std::size_t n = static_cast<std::size_t>(n_objects);
  std::vector<std::vector<ChargeSign>> charge_options;
  charge_options.push_back(std::vector<ChargeSign>(n, ChargeSign::neutral));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      // canonical sign patterns: lower id positive
      for (ChargeSign partner : {ChargeSign::positive, ChargeSign::negative}) {
        std::vector<ChargeSign> c(n, ChargeSign::neutral);
        c[i] = ChargeSign::positive;
        c[j] = partner;
        charge_options.push_back(std::move(c));
      }
    }
  }
  std::vector<std::vector<MassLevel>> mass_options;
  mass_options.push_back(std::vector<MassLevel>(n, MassLevel::light));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<MassLevel> m(n, MassLevel::light);
    m[i] = MassLevel::heavy;
    mass_options.push_back(std::move(m));
  }
  std::vector<Hypothesis> out;
  out.reserve(charge_options.size() * mass_options.size());
  for (const auto& c : charge_options) {
    for (const auto& m : mass_options) {
      out.push_back({m, c});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Event-signature rules
// ---------------------------------------------------------------------------

namespace {

constexpr double kDeflectionMargin = 2.5;   // mass ratio discriminant
constexpr double kMinImpulse = 0.05;        // ignore grazing contacts
constexpr double kConfUnequal = 0.95;
constexpr double kConfEqual = 0.9;
constexpr double kConfAbsence = 0.75;

void set_node(PropertyGraph& g, int id, MassLevel mass, double conf) {
  auto it = g.node_mass.find(id);
  if (it == g.node_mass.end() || it->second.confidence < conf) {
    g.node_mass[id] = {mass, conf};
  }
}

void set_edge(PropertyGraph& g, int a, int b, ChargeRel rel, double conf) {
  const auto key = ordered_pair(a, b);
  auto it = g.edge_charge.find(key);
  if (it == g.edge_charge.end() || it->second.confidence < conf) {
    g.edge_charge[key] = {rel, conf};
  }
}

}  // namespace

PropertyGraph infer_from_events_single(const SceneRecord& record,
                                       const std::vector<ObjectSpec>& roster) {
  (void)roster;  // inference reads the record only
  PropertyGraph g;

  // relative charge straight from force events
  for (const auto& e : record.events) {
    if (e.kind == EventKind::attraction) {
      set_edge(g, e.participants[0], e.participants[1], ChargeRel::opposite,
               1.0);
    } else if (e.kind == EventKind::repulsion) {
      set_edge(g, e.participants[0], e.participants[1], ChargeRel::same, 1.0);
    }
  }
  // co-occurring pairs with no force evidence read as neutral pairs
  for (std::size_t i = 0; i < record.objects.size(); ++i) {
    for (std::size_t j = i + 1; j < record.objects.size(); ++j) {
      const auto key = ordered_pair(record.objects[i].id, record.objects[j].id);
      if (!g.edge_charge.count(key)) {
        g.edge_charge[key] = {ChargeRel::none, kConfAbsence};
      }
    }
  }

  // relative mass from collision deflection: dv = J/m, so the body with the
  // smaller velocity change is heavier; internal pair forces (impulse and
  // coulomb) keep the ratio exact, external impulses in the window spoil it
  for (const auto& e : record.events) {
    if (e.kind != EventKind::collision) continue;
    const int f = e.frame;
    if (f + 1 >= record.frame_count()) continue;
    const int a = e.participants[0];
    const int b = e.participants[1];

    bool contaminated = false;
    for (const auto& wc : record.wall_contacts) {
      if (wc.frame == f && (wc.id == a || wc.id == b)) contaminated = true;
    }
    for (const auto& c : record.contacts) {
      if (c.frame != f) continue;
      const bool same_pair = ordered_pair(c.a, c.b) == ordered_pair(a, b);
      if (!same_pair && (c.a == a || c.b == a || c.a == b || c.b == b)) {
        contaminated = true;
      }
    }
    if (contaminated) continue;

    const int ia = record.index_of(a);
    const int ib = record.index_of(b);
    const auto& fa = record.frames[static_cast<std::size_t>(f)];
    const auto& fb = record.frames[static_cast<std::size_t>(f + 1)];
    const double dva =
        (fb[static_cast<std::size_t>(ia)].velocity -
         fa[static_cast<std::size_t>(ia)].velocity).norm();
    const double dvb =
        (fb[static_cast<std::size_t>(ib)].velocity -
         fa[static_cast<std::size_t>(ib)].velocity).norm();
    if (dva < kMinImpulse || dvb < kMinImpulse) continue;

    const double ratio = dva / dvb;  // = m_b / m_a
    if (ratio > kDeflectionMargin) {
      set_node(g, b, MassLevel::heavy, kConfUnequal);
      set_node(g, a, MassLevel::light, kConfUnequal);
    } else if (ratio < 1.0 / kDeflectionMargin) {
      set_node(g, a, MassLevel::heavy, kConfUnequal);
      set_node(g, b, MassLevel::light, kConfUnequal);
    } else {
      // equal response: with at most one heavy object both must be light
      set_node(g, a, MassLevel::light, kConfEqual);
      set_node(g, b, MassLevel::light, kConfEqual);
    }
  }
  return g;
}

PropertyGraph infer_from_events(const std::vector<const SceneRecord*>& records,
                                const std::vector<ObjectSpec>& roster) {
  std::vector<PropertyGraph> partials;
  for (const auto* rec : records) {
    partials.push_back(infer_from_events_single(*rec, roster));
  }
  return fuse_subgraphs(partials, roster);
}

// ---------------------------------------------------------------------------
// Hypothesis enumeration
// ---------------------------------------------------------------------------

namespace {

PropertyGraph graph_from_hypothesis(const Hypothesis& h,
                                    const std::vector<ObjectSpec>& roster) {
  PropertyGraph g;
  for (std::size_t i = 0; i < roster.size(); ++i) {
    g.node_mass[roster[i].id] = {h.mass[i], 1.0};
  }
  for (std::size_t i = 0; i < roster.size(); ++i) {
    for (std::size_t j = i + 1; j < roster.size(); ++j) {
      const double qq = charge_value(h.charge[i]) * charge_value(h.charge[j]);
      ChargeRel rel = ChargeRel::none;
      if (qq > 0) rel = ChargeRel::same;
      if (qq < 0) rel = ChargeRel::opposite;
      g.edge_charge[ordered_pair(roster[i].id, roster[j].id)] = {rel, 1.0};
    }
  }
  return g;
}

double reference_discrepancy(const SceneRecord& observed,
                             const Hypothesis& h,
                             const std::vector<ObjectSpec>& roster,
                             const PhysicsConfig& cfg) {
  // cast specs pick up the hypothesis properties
  std::vector<ObjectSpec> cast = observed.objects;
  for (auto& o : cast) {
    for (std::size_t r = 0; r < roster.size(); ++r) {
      if (roster[r].id == o.id) {
        o.mass = h.mass[r];
        o.charge = h.charge[r];
      }
    }
  }
  InitialConditions init{cast, observed.frames.front()};
  const SceneRecord sim =
      simulate_frames(init, observed.duration_s, cfg, observed.kind);

  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t f = 0; f < observed.frames.size(); ++f) {
    for (std::size_t i = 0; i < observed.objects.size(); ++i) {
      sum += (sim.frames[f][i].position - observed.frames[f][i].position)
                 .norm_sq();
      ++count;
    }
  }
  return count ? sum / static_cast<double>(count) : 0.0;
}

}  // namespace

EnumerationResult infer_by_enumeration(const VideoSet& set,
                                       const PhysicsConfig& cfg) {
  const int n = static_cast<int>(set.roster.size());
  const auto hypotheses = enumerate_hypotheses(n);

  EnumerationResult result;
  result.ranking.reserve(hypotheses.size());
  for (const auto& h : hypotheses) {
    FitScore fit;
    fit.hypothesis = h;
    for (const auto& ref : set.references) {
      const double d = reference_discrepancy(ref, h, set.roster, cfg);
      fit.per_video.push_back(d);
      fit.total += d;
    }
    result.ranking.push_back(std::move(fit));
  }

  // ascending score; ties break toward the sparsest hypothesis
  auto rank_key = [](const FitScore& f) {
    return std::make_tuple(f.total, f.hypothesis.n_charged(),
                           f.hypothesis.n_heavy(), f.hypothesis.signature());
  };
  std::sort(result.ranking.begin(), result.ranking.end(),
            [&](const FitScore& a, const FitScore& b) {
              return rank_key(a) < rank_key(b);
            });

  const double best_total = result.ranking.front().total;
  const double tol = std::max(1e-12, 1e-6 * best_total);
  std::size_t tied = 1;
  while (tied < result.ranking.size() &&
         result.ranking[tied].total <= best_total + tol) {
    ++tied;
  }
  result.tied_count = tied;
  result.best = result.ranking.front().hypothesis;

  // ambiguity: do the tied hypotheses disagree on any label?
  const PropertyGraph best_graph = graph_from_hypothesis(result.best, set.roster);
  for (std::size_t k = 1; k < tied; ++k) {
    const PropertyGraph other =
        graph_from_hypothesis(result.ranking[k].hypothesis, set.roster);
    if (!best_graph.labels_equal(other)) {
      result.ambiguous = true;
      break;
    }
  }

  // softmin confidences over the whole ranking
  const double mean_total = [&] {
    double s = 0.0;
    for (const auto& fs : result.ranking) s += fs.total;
    return s / static_cast<double>(result.ranking.size());
  }();
  const double tau = std::max(1e-9, 0.05 * mean_total);
  std::vector<double> weights;
  double weight_sum = 0.0;
  for (const auto& fs : result.ranking) {
    const double w = std::exp(-(fs.total - best_total) / tau);
    weights.push_back(w);
    weight_sum += w;
  }

  result.graph = best_graph;
  for (auto& [id, label] : result.graph.node_mass) {
    double agree = 0.0;
    for (std::size_t k = 0; k < result.ranking.size(); ++k) {
      std::size_t idx = 0;
      for (std::size_t r = 0; r < set.roster.size(); ++r) {
        if (set.roster[r].id == id) idx = r;
      }
      if (result.ranking[k].hypothesis.mass[idx] == label.mass) {
        agree += weights[k];
      }
    }
    label.confidence = agree / weight_sum;
  }
  for (auto& [key, edge] : result.graph.edge_charge) {
    std::size_t ia = 0, ib = 0;
    for (std::size_t r = 0; r < set.roster.size(); ++r) {
      if (set.roster[r].id == key.first) ia = r;
      if (set.roster[r].id == key.second) ib = r;
    }
    double agree = 0.0;
    for (std::size_t k = 0; k < result.ranking.size(); ++k) {
      const auto& h = result.ranking[k].hypothesis;
      const double qq = charge_value(h.charge[ia]) * charge_value(h.charge[ib]);
      ChargeRel rel = ChargeRel::none;
      if (qq > 0) rel = ChargeRel::same;
      if (qq < 0) rel = ChargeRel::opposite;
      if (rel == edge.rel) agree += weights[k];
    }
    edge.confidence = agree / weight_sum;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Fusion
// ---------------------------------------------------------------------------

PropertyGraph fuse_subgraphs(const std::vector<PropertyGraph>& partials,
                             const std::vector<ObjectSpec>& roster,
                             std::vector<std::string>* warnings) {
  // ids align across partials through the unique attribute triple
  std::map<std::tuple<Color, Shape, Material>, int> by_triple;
  for (const auto& o : roster) by_triple[o.attribute_triple()] = o.id;
  auto aligned = [&](int id) {
    for (const auto& o : roster) {
      if (o.id == id) return by_triple.at(o.attribute_triple());
    }
    return id;
  };

  PropertyGraph fused;
  for (const auto& partial : partials) {
    for (const auto& [id, label] : partial.node_mass) {
      const int node = aligned(id);
      auto it = fused.node_mass.find(node);
      if (it == fused.node_mass.end()) {
        fused.node_mass[node] = label;
      } else if (label.confidence > it->second.confidence) {
        if (warnings && it->second.mass != label.mass) {
          warnings->push_back("node " + std::to_string(node) +
                              " mass conflict resolved toward confidence " +
                              std::to_string(label.confidence));
        }
        it->second = label;
      } else if (warnings && it->second.mass != label.mass) {
        warnings->push_back("node " + std::to_string(node) +
                            " mass conflict kept at confidence " +
                            std::to_string(it->second.confidence));
      }
    }
    for (const auto& [key, edge] : partial.edge_charge) {
      const auto node_key = ordered_pair(aligned(key.first), aligned(key.second));
      auto it = fused.edge_charge.find(node_key);
      if (it == fused.edge_charge.end()) {
        fused.edge_charge[node_key] = edge;
      } else if (edge.confidence > it->second.confidence) {
        if (warnings && it->second.rel != edge.rel) {
          warnings->push_back("edge (" + std::to_string(node_key.first) + "," +
                              std::to_string(node_key.second) +
                              ") charge conflict resolved toward confidence " +
                              std::to_string(edge.confidence));
        }
        it->second = edge;
      } else if (warnings && it->second.rel != edge.rel) {
        warnings->push_back("edge (" + std::to_string(node_key.first) + "," +
                            std::to_string(node_key.second) +
                            ") charge conflict kept");
      }
    }
  }
  return fused;
}

PropertyGraph complete_graph(PropertyGraph g,
                             const std::vector<ObjectSpec>& roster) {
  for (const auto& o : roster) {
    if (!g.node_mass.count(o.id)) {
      g.node_mass[o.id] = {MassLevel::light, 0.5};
    }
  }
  for (std::size_t i = 0; i < roster.size(); ++i) {
    for (std::size_t j = i + 1; j < roster.size(); ++j) {
      const auto key = ordered_pair(roster[i].id, roster[j].id);
      if (!g.edge_charge.count(key)) {
        g.edge_charge[key] = {ChargeRel::none, 0.5};
      }
    }
  }
  return g;
}

PropertyGraph truth_graph(const std::vector<ObjectSpec>& roster) {
  PropertyGraph g;
  for (const auto& o : roster) {
    g.node_mass[o.id] = {o.mass, 1.0};
  }
  for (std::size_t i = 0; i < roster.size(); ++i) {
    for (std::size_t j = i + 1; j < roster.size(); ++j) {
      const double qq =
          charge_value(roster[i].charge) * charge_value(roster[j].charge);
      ChargeRel rel = ChargeRel::none;
      if (qq > 0) rel = ChargeRel::same;
      if (qq < 0) rel = ChargeRel::opposite;
      g.edge_charge[ordered_pair(roster[i].id, roster[j].id)] = {rel, 1.0};
    }
  }
  return g;
}

}  // namespace physq
