#include "physq/question_gen.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <set>
#include <sstream>

namespace physq {

namespace {

constexpr const char* kFrameEnd = "(get_frame (end))";
constexpr const char* kFrameStart = "(get_frame (start))";

std::string pa_filter(const std::string& inner, const std::string& pa) {
  if (pa.empty()) return inner;
  return "(filter_" + pa + " " + inner + ")";
}

std::string da_filter(const std::string& inner, const std::string& da,
                      const std::string& frame_expr) {
  if (da.empty()) return inner;
  return "(filter_dynamic_attr " + inner + " " + da + " " + frame_expr + ")";
}

std::string plural(const std::string& word) { return word + "s"; }

std::string singular(const std::string& word) {
  return word.substr(0, word.size() - 1);
}

}  // namespace

// ---------------------------------------------------------------------------
// Descriptors
// ---------------------------------------------------------------------------

bool Descriptor::matches(const ObjectSpec& o) const {
  if (color && *color != o.color) return false;
  if (material && *material != o.material) return false;
  if (shape && *shape != o.shape) return false;
  return true;
}

std::string descriptor_text(const Descriptor& d, bool plural_form) {
  std::string out;
  if (d.color) out += to_string(*d.color) + " ";
  if (d.material) out += to_string(*d.material) + " ";
  out += d.shape ? to_string(*d.shape) : "object";
  if (plural_form) out = plural(out);
  return out;
}

Descriptor unique_descriptor(const ObjectSpec& o,
                             const std::vector<ObjectSpec>& roster) {
  const std::vector<Descriptor> candidates = {
      {std::nullopt, std::nullopt, o.shape},
      {o.color, std::nullopt, std::nullopt},
      {o.color, std::nullopt, o.shape},
      {std::nullopt, o.material, o.shape},
      {o.color, o.material, std::nullopt},
      {o.color, o.material, o.shape},
  };
  for (const auto& d : candidates) {
    int hits = 0;
    for (const auto& other : roster) {
      if (d.matches(other)) ++hits;
    }
    if (hits == 1) return d;
  }
  return candidates.back();  // the full triple is unique by roster invariant
}

std::string selector_program(const Descriptor& d) {
  std::string p = "(objects)";
  if (d.color) p = "(filter_static_attr " + p + " " + to_string(*d.color) + ")";
  if (d.material) {
    p = "(filter_static_attr " + p + " " + to_string(*d.material) + ")";
  }
  if (d.shape) p = "(filter_static_attr " + p + " " + to_string(*d.shape) + ")";
  return p;
}

// ---------------------------------------------------------------------------
// Template registry
// ---------------------------------------------------------------------------

const std::vector<QTemplate>& question_templates() {
  static const std::vector<QTemplate> templates = {
      {"query", QuestionType::factual,
       "What is the _H_ of the _DA_ _SA_ that is _PA_?",
       "(query_attribute (unique (filter__PA_ (filter_dynamic_attr _SA_ _DA_ "
       "_TI_))) _H_)"},
      {"exist", QuestionType::factual, "Are there any _PA_ _DA_ _SA_ _TI_?",
       "(exist (filter__PA_ (filter_dynamic_attr _SA_ _DA_ _TI_)))"},
      {"count", QuestionType::factual,
       "How many _PA_ _DA_ _SA_ are there _TI_?",
       "(count (filter__PA_ (filter_dynamic_attr _SA_ _DA_ _TI_)))"},
      {"mass_compare_heavier", QuestionType::factual,
       "Is the _DA1_ _SA1_ heavier than the _DA2_ _SA2_?",
       "(is_heavier (unique (filter_dynamic_attr _SA1_ _DA1_ _TI_)) (unique "
       "(filter_dynamic_attr _SA2_ _DA2_ _TI_)))"},
      {"mass_compare_lighter", QuestionType::factual,
       "Is the _DA1_ _SA1_ lighter than the _DA2_ _SA2_?",
       "(is_lighter (unique (filter_dynamic_attr _SA1_ _DA1_ _TI_)) (unique "
       "(filter_dynamic_attr _SA2_ _DA2_ _TI_)))"},
      {"charge_opposite", QuestionType::factual,
       "Are the _DA1_ _SA1_ and the _DA2_ _SA2_ oppositely charged?",
       "(is_opposite_charged (unique (filter_dynamic_attr _SA1_ _DA1_ _TI_)) "
       "(unique (filter_dynamic_attr _SA2_ _DA2_ _TI_)))"},
      {"charge_same", QuestionType::factual,
       "Are the _DA1_ _SA1_ and the _DA2_ _SA2_ with the same type of charge?",
       "(is_same_charged (unique (filter_dynamic_attr _SA1_ _DA1_ _TI_)) "
       "(unique (filter_dynamic_attr _SA2_ _DA2_ _TI_)))"},
      {"query_both", QuestionType::factual,
       "What are the _Hs_ of the two objects that are charged?",
       "(query_both_attribute (filter_charged (objects)) _H_)"},
      {"counterfactual_mass", QuestionType::counterfactual_mass,
       "If the _SA_ were _MP_, _Q_?",
       "_Q_-labeled choices over (counterfactual_mass__MP_ (unique _SA_))"},
      {"counterfactual_charge", QuestionType::counterfactual_charge,
       "If the _SA_ were _CP_, _Q_?",
       "_Q_-labeled choices over (counterfactual__CP_ (unique _SA_))"},
      {"predictive", QuestionType::predictive,
       "Which of the following events will happen next?",
       "choices over (unseen_events)"},
  };
  return templates;
}

// ---------------------------------------------------------------------------
// Oracle world used while generating (ground truth + re-simulated edits)
// ---------------------------------------------------------------------------

namespace {

World oracle_world(const VideoSet& set, const CounterfactualCache& cache) {
  World w;
  w.target = &set.target;
  w.future = &set.future;
  w.props = PropertiesView::from_roster(set.roster);
  for (const auto& [key, rec] : cache) {
    w.counterfactual[key] = &rec;
  }
  return w;
}

std::string answer_of(const std::string& program_text, const World& w) {
  return value_to_answer(execute(parse_program(program_text), w));
}

struct EventKey {
  EventKind kind;
  int a;
  int b;
  bool operator<(const EventKey& o) const {
    return std::tie(kind, a, b) < std::tie(o.kind, o.a, o.b);
  }
};

std::vector<EventKey> interaction_keys(const SceneRecord& rec) {
  std::set<EventKey> keys;
  for (const auto& e : rec.events) {
    if (!e.is_interaction()) continue;
    const auto [a, b] = ordered_pair(e.participants[0], e.participants[1]);
    keys.insert({e.kind, a, b});
  }
  return {keys.begin(), keys.end()};
}

std::string event_phrase(const EventKey& key,
                         const std::vector<ObjectSpec>& roster) {
  const ObjectSpec* oa = nullptr;
  const ObjectSpec* ob = nullptr;
  for (const auto& o : roster) {
    if (o.id == key.a) oa = &o;
    if (o.id == key.b) ob = &o;
  }
  const std::string da = descriptor_text(unique_descriptor(*oa, roster));
  const std::string db = descriptor_text(unique_descriptor(*ob, roster));
  switch (key.kind) {
    case EventKind::collision:
      return "the " + da + " collides with the " + db;
    case EventKind::attraction:
      return "the " + da + " and the " + db + " attract each other";
    default:
      return "the " + da + " and the " + db + " repel each other";
  }
}

std::string event_choice_program(const EventKey& key,
                                 const std::string& events_expr,
                                 const std::vector<ObjectSpec>& roster,
                                 bool negated) {
  const ObjectSpec* oa = nullptr;
  const ObjectSpec* ob = nullptr;
  for (const auto& o : roster) {
    if (o.id == key.a) oa = &o;
    if (o.id == key.b) ob = &o;
  }
  const std::string sa = selector_program(unique_descriptor(*oa, roster));
  const std::string sb = selector_program(unique_descriptor(*ob, roster));
  std::string p = "(exist (filter_event (filter_event " + events_expr + " " +
                  sa + " " + to_string(key.kind) + ") " + sb + "))";
  if (negated) p = "(negate " + p + ")";
  return p;
}

// candidate pool for multiple-choice questions: events that occur plus
// fabricated ones that do not
struct ChoicePool {
  std::vector<EventKey> occurring;
  std::vector<EventKey> absent;
};

ChoicePool build_choice_pool(const SceneRecord& world_rec,
                             const std::vector<ObjectSpec>& cast) {
  ChoicePool pool;
  pool.occurring = interaction_keys(world_rec);
  std::set<EventKey> seen(pool.occurring.begin(), pool.occurring.end());
  for (std::size_t i = 0; i < cast.size(); ++i) {
    for (std::size_t j = i + 1; j < cast.size(); ++j) {
      const auto [a, b] = ordered_pair(cast[i].id, cast[j].id);
      for (EventKind kind : {EventKind::collision, EventKind::attraction,
                             EventKind::repulsion}) {
        const EventKey key{kind, a, b};
        if (!seen.count(key)) pool.absent.push_back(key);
      }
    }
  }
  return pool;
}

// picks 3-4 choices with at least one true and one false label
std::vector<Choice> assemble_choices(const ChoicePool& pool,
                                     const std::string& events_expr,
                                     const std::vector<ObjectSpec>& roster,
                                     bool negated_question, RngStream& rng,
                                     const World& w,
                                     const QuestionGenConfig& cfg) {
  if (pool.occurring.empty() || pool.absent.empty()) return {};
  std::vector<EventKey> occurring = pool.occurring;
  std::vector<EventKey> absent = pool.absent;
  rng.shuffle(occurring);
  rng.shuffle(absent);

  const int n_choices = rng.uniform_int(cfg.min_choices, cfg.max_choices);
  std::vector<EventKey> picks;
  picks.push_back(occurring[0]);
  picks.push_back(absent[0]);
  std::size_t oi = 1, ai = 1;
  while (static_cast<int>(picks.size()) < n_choices &&
         (oi < occurring.size() || ai < absent.size())) {
    const bool from_occurring =
        oi < occurring.size() && (ai >= absent.size() || rng.bernoulli(0.5));
    picks.push_back(from_occurring ? occurring[oi++] : absent[ai++]);
  }
  rng.shuffle(picks);

  std::vector<Choice> out;
  for (const auto& key : picks) {
    Choice c;
    c.text = event_phrase(key, roster);
    const Program p = parse_program(
        event_choice_program(key, events_expr, roster, negated_question));
    c.program = print_program(p);
    c.truth = value_to_answer(execute(p, w)) == "yes";
    out.push_back(std::move(c));
  }
  return out;
}

const std::vector<std::string> kTimeIndicators = {"", "when the video ends",
                                                  "when the video starts"};

std::string frame_expr_for(const std::string& ti) {
  return ti == "when the video starts" ? kFrameStart : kFrameEnd;
}

}  // namespace

SceneRecord simulate_counterfactual(const VideoSet& set, const std::string& edit,
                                    int object_id, const PhysicsConfig& phys) {
  std::vector<ObjectSpec> roster = set.roster;
  for (auto& o : roster) {
    if (o.id != object_id) continue;
    if (edit == "mass_heavy") o.mass = MassLevel::heavy;
    if (edit == "mass_light") o.mass = MassLevel::light;
    if (edit == "uncharged") o.charge = ChargeSign::neutral;
    if (edit == "opposite_charged") {
      o.charge = o.charge == ChargeSign::positive   ? ChargeSign::negative
                 : o.charge == ChargeSign::negative ? ChargeSign::positive
                                                    : ChargeSign::neutral;
    }
  }
  // cast order must match the target's frame layout
  std::vector<ObjectSpec> cast;
  for (const auto& o : set.target.objects) {
    for (const auto& edited : roster) {
      if (edited.id == o.id) cast.push_back(edited);
    }
  }
  InitialConditions init{cast, set.target.frames.front()};
  return simulate(init, set.target.duration_s, phys, RecordKind::target);
}

// ---------------------------------------------------------------------------
// Factual questions
// ---------------------------------------------------------------------------

std::vector<Question> instantiate_factual(const VideoSet& set, RngStream& rng,
                                          int quota) {
  CounterfactualCache empty_cache;
  const World w = oracle_world(set, empty_cache);
  std::vector<Question> out;

  auto try_emit = [&](const std::string& template_id, const std::string& text,
                      const std::string& program) -> bool {
    for (const auto& q : out) {
      if (q.text == text) return false;
    }
    try {
      Question q;
      q.text = text;
      q.qtype = QuestionType::factual;
      q.template_id = template_id;
      q.program = print_program(parse_program(program));
      q.answer = answer_of(q.program, w);
      out.push_back(std::move(q));
      return true;
    } catch (const ExecError&) {
      return false;  // non-unique referent or empty selection: skip filler
    }
  };

  // -- query: unique referent with a physical attribute
  auto emit_query = [&]() {
    std::vector<const ObjectSpec*> order;
    for (const auto& o : set.roster) order.push_back(&o);
    rng.shuffle(order);
    for (const auto* o : order) {
      const Descriptor d = unique_descriptor(*o, set.roster);
      const std::string pa =
          rng.bernoulli(0.5)
              ? (o->mass == MassLevel::heavy ? "heavy" : "light")
              : (o->charge != ChargeSign::neutral ? "charged" : "uncharged");
      const bool moving = moving_predicate(
          set.target.state_of(o->id, set.target.frame_count() - 1));
      const std::string da = rng.bernoulli(0.5) ? "" : (moving ? "moving" : "stationary");
      std::vector<std::string> heads;
      if (!d.color) heads.push_back("color");
      if (!d.shape) heads.push_back("shape");
      if (!d.material) heads.push_back("material");
      if (heads.empty()) continue;
      const std::string h = heads[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<int>(heads.size()) - 1))];
      const std::string text = "What is the " + h + " of the " +
                               (da.empty() ? "" : da + " ") +
                               descriptor_text(d) + " that is " + pa + "?";
      const std::string program =
          "(query_attribute (unique " +
          pa_filter(da_filter(selector_program(d), da, kFrameEnd), pa) + ") " +
          h + ")";
      if (try_emit("query", text, program)) return;
    }
  };

  // -- exist / count over attribute classes
  auto emit_class = [&](bool exist_form) {
    for (int attempt = 0; attempt < 12; ++attempt) {
      Descriptor d;
      const int shape_roll = rng.uniform_int(0, 3);
      if (shape_roll < 3) d.shape = kAllShapes[static_cast<std::size_t>(shape_roll)];
      if (rng.bernoulli(0.25)) {
        d.color = kAllColors[static_cast<std::size_t>(rng.uniform_int(0, 7))];
      }
      static const std::vector<std::string> pas = {"", "heavy", "light",
                                                   "charged", "uncharged"};
      static const std::vector<std::string> das = {"", "moving", "stationary"};
      const std::string pa =
          pas[static_cast<std::size_t>(rng.uniform_int(0, 4))];
      const std::string da =
          das[static_cast<std::size_t>(rng.uniform_int(0, 2))];
      if (pa.empty() && da.empty()) continue;
      const std::string ti =
          da.empty() ? ""
                     : kTimeIndicators[static_cast<std::size_t>(
                           rng.uniform_int(0, 2))];
      const std::string noun = descriptor_text(d, /*plural=*/true);
      const std::string head = (pa.empty() ? "" : pa + " ") +
                               (da.empty() ? "" : da + " ") + noun;
      const std::string text =
          exist_form
              ? "Are there any " + head + (ti.empty() ? "" : " " + ti) + "?"
              : "How many " + head + " are there" + (ti.empty() ? "" : " " + ti) +
                    "?";
      const std::string chain =
          pa_filter(da_filter(selector_program(d), da, frame_expr_for(ti)), pa);
      const std::string program =
          (exist_form ? "(exist " : "(count ") + chain + ")";
      if (try_emit(exist_form ? "exist" : "count", text, program)) return;
    }
  };

  // -- pairwise comparisons, informative pairs only
  auto emit_compare = [&](bool mass_form) {
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t i = 0; i < set.roster.size(); ++i) {
      for (std::size_t j = 0; j < set.roster.size(); ++j) {
        if (i == j) continue;
        if (pair_has_interaction(set, set.roster[i].id, set.roster[j].id)) {
          pairs.push_back({set.roster[i].id, set.roster[j].id});
        }
      }
    }
    rng.shuffle(pairs);
    for (const auto& [ida, idb] : pairs) {
      const ObjectSpec* oa = set.find(ida);
      const ObjectSpec* ob = set.find(idb);
      const Descriptor da = unique_descriptor(*oa, set.roster);
      const Descriptor db = unique_descriptor(*ob, set.roster);
      // optional dynamic attribute, drawn from the object's end-frame state
      auto dyn = [&](const ObjectSpec& o) -> std::string {
        if (!rng.bernoulli(0.3)) return "";
        return moving_predicate(
                   set.target.state_of(o.id, set.target.frame_count() - 1))
                   ? "moving"
                   : "stationary";
      };
      const std::string da1 = dyn(*oa);
      const std::string da2 = dyn(*ob);
      auto referent = [&](const Descriptor& d, const std::string& dv) {
        return "(unique " + da_filter(selector_program(d), dv, kFrameEnd) + ")";
      };
      auto the = [&](const Descriptor& d, const std::string& dv) {
        return "the " + (dv.empty() ? "" : dv + " ") + descriptor_text(d);
      };
      std::string template_id, middle, program_op;
      if (mass_form) {
        const bool heavier = rng.bernoulli(0.5);
        template_id = heavier ? "mass_compare_heavier" : "mass_compare_lighter";
        middle = heavier ? " heavier than " : " lighter than ";
        program_op = heavier ? "is_heavier" : "is_lighter";
        const std::string text =
            "Is " + the(da, da1) + middle + the(db, da2) + "?";
        const std::string program = "(" + program_op + " " + referent(da, da1) +
                                    " " + referent(db, da2) + ")";
        if (try_emit(template_id, text, program)) return;
      } else {
        const bool opposite = rng.bernoulli(0.5);
        template_id = opposite ? "charge_opposite" : "charge_same";
        const std::string text =
            "Are " + the(da, da1) + " and " + the(db, da2) +
            (opposite ? " oppositely charged?" : " with the same type of charge?");
        const std::string program =
            std::string(opposite ? "(is_opposite_charged" : "(is_same_charged") +
            " " + referent(da, da1) + " " + referent(db, da2) + ")";
        if (try_emit(template_id, text, program)) return;
      }
    }
  };

  // -- query both charged objects
  auto emit_query_both = [&]() {
    if (charged_ids(set.roster).size() != 2) return;
    static const std::vector<std::string> heads = {"color", "shape", "material"};
    const std::string h =
        heads[static_cast<std::size_t>(rng.uniform_int(0, 2))];
    const std::string text =
        "What are the " + plural(h) + " of the two objects that are charged?";
    const std::string program =
        "(query_both_attribute (filter_charged (objects)) " + h + ")";
    try_emit("query_both", text, program);
  };

  emit_query();
  emit_class(true);
  emit_class(false);
  emit_compare(true);
  emit_compare(false);
  emit_query_both();
  while (static_cast<int>(out.size()) < quota) {
    const std::size_t before = out.size();
    emit_class(rng.bernoulli(0.5));
    if (out.size() == before) break;
  }
  if (static_cast<int>(out.size()) > quota) {
    rng.shuffle(out);
    out.resize(static_cast<std::size_t>(quota));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Counterfactual questions
// ---------------------------------------------------------------------------

std::vector<Question> instantiate_counterfactual(const VideoSet& set,
                                                 const PhysicsConfig& phys,
                                                 RngStream& rng, int quota,
                                                 CounterfactualCache& cache,
                                                 const QuestionGenConfig& cfg) {
  std::vector<Question> out;

  // hypothesis objects must interact in the target video
  std::vector<const ObjectSpec*> interacting;
  for (const auto& o : set.roster) {
    bool has = false;
    for (const auto& e : set.target.events) {
      if (e.is_interaction() && e.involves(o.id)) has = true;
    }
    if (has) interacting.push_back(&o);
  }

  struct Candidate {
    const ObjectSpec* obj;
    std::string edit;   // mass_heavy / mass_light / uncharged / opposite_charged
    std::string phrase; // heavier / lighter / uncharged / oppositely charged
    QuestionType qtype;
  };
  std::vector<Candidate> candidates;
  for (const auto* o : interacting) {
    if (o->mass == MassLevel::heavy) {
      candidates.push_back({o, "mass_light", "lighter",
                            QuestionType::counterfactual_mass});
    } else {
      candidates.push_back({o, "mass_heavy", "heavier",
                            QuestionType::counterfactual_mass});
    }
    if (o->charge != ChargeSign::neutral) {
      candidates.push_back({o, "uncharged", "uncharged",
                            QuestionType::counterfactual_charge});
      candidates.push_back({o, "opposite_charged", "oppositely charged",
                            QuestionType::counterfactual_charge});
    }
  }
  rng.shuffle(candidates);

  for (const auto& cand : candidates) {
    if (static_cast<int>(out.size()) >= quota) break;
    const auto key = std::make_pair(cand.edit, cand.obj->id);
    if (!cache.count(key)) {
      cache[key] = simulate_counterfactual(set, cand.edit, cand.obj->id, phys);
    }
    const World w = oracle_world(set, cache);
    const SceneRecord& cf_record = cache.at(key);

    const Descriptor desc = unique_descriptor(*cand.obj, set.roster);
    const bool negated = rng.bernoulli(0.35);
    const std::string events_expr =
        "(counterfactual_" +
        (cand.edit == "mass_heavy"         ? std::string("mass_heavy")
         : cand.edit == "mass_light"       ? std::string("mass_light")
         : cand.edit == "uncharged"        ? std::string("uncharged")
                                           : std::string("opposite_charged")) +
        " (unique " + selector_program(desc) + "))";

    const ChoicePool pool = build_choice_pool(cf_record, set.target.objects);
    auto choices =
        assemble_choices(pool, events_expr, set.roster, negated, rng, w, cfg);
    if (choices.empty()) continue;

    Question q;
    q.qtype = cand.qtype;
    q.template_id = cand.qtype == QuestionType::counterfactual_mass
                        ? "counterfactual_mass"
                        : "counterfactual_charge";
    q.text = "If the " + descriptor_text(desc) + " were " + cand.phrase +
             (negated ? ", which of the following events would not happen?"
                      : ", which of the following events would happen?");
    q.program = print_program(parse_program(events_expr));
    q.choices = std::move(choices);
    out.push_back(std::move(q));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Predictive questions
// ---------------------------------------------------------------------------

std::vector<Question> instantiate_predictive(const VideoSet& set,
                                             RngStream& rng, int quota,
                                             const QuestionGenConfig& cfg) {
  std::vector<Question> out;
  CounterfactualCache empty_cache;
  const World w = oracle_world(set, empty_cache);
  for (int k = 0; k < quota; ++k) {
    const ChoicePool pool = build_choice_pool(set.future, set.target.objects);
    auto choices = assemble_choices(pool, "(unseen_events)", set.roster,
                                    /*negated=*/false, rng, w, cfg);
    if (choices.empty()) break;  // degenerate future
    Question q;
    q.qtype = QuestionType::predictive;
    q.template_id = "predictive";
    q.text = "Which of the following events will happen next?";
    q.program = "(unseen_events)";
    q.choices = std::move(choices);
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<Question> generate_questions(const VideoSet& set,
                                         const PhysicsConfig& phys,
                                         std::uint64_t question_seed,
                                         CounterfactualCache& cache,
                                         const QuestionGenConfig& cfg) {
  RngStream rng(question_seed);
  std::vector<Question> out;
  auto factual = instantiate_factual(set, rng, cfg.factual_per_set);
  auto counterfactual = instantiate_counterfactual(
      set, phys, rng, cfg.counterfactual_per_set, cache, cfg);
  auto predictive = instantiate_predictive(set, rng, cfg.predictive_per_set, cfg);
  for (auto& q : factual) out.push_back(std::move(q));
  for (auto& q : counterfactual) out.push_back(std::move(q));
  for (auto& q : predictive) out.push_back(std::move(q));
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].id = "q" + std::to_string(i);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Balancing
// ---------------------------------------------------------------------------

std::vector<Question> balance_corpus(const std::vector<Question>& pooled,
                                     double tolerance_pp,
                                     BalanceReport* report) {
  auto bucket = [](QuestionType t) -> std::string {
    switch (t) {
      case QuestionType::factual: return "factual";
      case QuestionType::predictive: return "predictive";
      default: return "counterfactual";
    }
  };
  static const std::map<std::string, double> targets = {
      {"factual", 0.42}, {"counterfactual", 0.50}, {"predictive", 0.08}};

  std::map<std::string, int> counts = {
      {"factual", 0}, {"counterfactual", 0}, {"predictive", 0}};
  for (const auto& q : pooled) ++counts[bucket(q.qtype)];

  long long n_star = -1;
  for (const auto& [name, frac] : targets) {
    const long long cap =
        static_cast<long long>(std::floor(counts.at(name) / frac));
    if (n_star < 0 || cap < n_star) n_star = cap;
  }
  if (n_star <= 0) {
    // a question type is missing entirely; trimming cannot fix proportions
    if (report) {
      report->before = counts;
      report->after = counts;
      report->feasible = false;
      const double total =
          std::max<double>(1.0, static_cast<double>(pooled.size()));
      for (const auto& [name, frac] : targets) {
        (void)frac;
        report->proportions[name] = counts.at(name) / total;
      }
    }
    return pooled;
  }
  std::map<std::string, int> keep;
  for (const auto& [name, frac] : targets) {
    keep[name] = static_cast<int>(std::floor(n_star * frac));
  }

  std::vector<Question> out;
  std::map<std::string, int> kept = {
      {"factual", 0}, {"counterfactual", 0}, {"predictive", 0}};
  for (const auto& q : pooled) {
    const std::string b = bucket(q.qtype);
    if (kept[b] < keep[b]) {
      out.push_back(q);
      ++kept[b];
    }
  }

  if (report) {
    report->before = counts;
    report->after = kept;
    report->feasible = true;
    const double total = std::max<double>(1.0, static_cast<double>(out.size()));
    for (const auto& [name, frac] : targets) {
      const double prop = kept[name] / total;
      report->proportions[name] = prop;
      if (std::abs(prop - frac) * 100.0 > tolerance_pp) {
        report->feasible = false;
      }
    }
  }
  return out;
}

nlohmann::json corpus_stats(const std::vector<Question>& questions) {
  nlohmann::json by_type = nlohmann::json::object();
  nlohmann::json answer_hist = nlohmann::json::object();
  std::map<std::string, int> type_counts;
  std::map<std::string, std::map<std::string, int>> hists;
  int n_choices = 0, n_true = 0;
  for (const auto& q : questions) {
    ++type_counts[to_string(q.qtype)];
    if (q.qtype == QuestionType::factual) {
      ++hists[q.template_id][q.answer];
    } else {
      for (const auto& c : q.choices) {
        ++n_choices;
        if (c.truth) ++n_true;
        ++hists[q.template_id][c.truth ? "true" : "false"];
      }
    }
  }
  for (const auto& [k, v] : type_counts) by_type[k] = v;
  for (const auto& [tid, hist] : hists) {
    nlohmann::json h = nlohmann::json::object();
    for (const auto& [ans, c] : hist) h[ans] = c;
    answer_hist[tid] = h;
  }
  const double total = std::max<std::size_t>(questions.size(), 1);
  nlohmann::json proportions = nlohmann::json::object();
  for (const auto& [k, v] : type_counts) {
    proportions[k] = v / static_cast<double>(total);
  }
  return nlohmann::json{{"total", questions.size()},
                        {"by_type", by_type},
                        {"proportions", proportions},
                        {"choice_count", n_choices},
                        {"choice_true_fraction",
                         n_choices ? static_cast<double>(n_true) / n_choices : 0.0},
                        {"answers_per_template", answer_hist}};
}

// ---------------------------------------------------------------------------
// Exact NL matching
// ---------------------------------------------------------------------------

namespace {

const char* kColorAlt = "gray|red|blue|green|brown|cyan|purple|yellow";
const char* kMaterialAlt = "metal|rubber";
const char* kShapeAlt = "cube|sphere|cylinder|object";
const char* kShapePlAlt = "cubes|spheres|cylinders|objects";

std::string desc_re(bool plural_form) {
  return std::string("(?:(") + kColorAlt + ") )?(?:(" + kMaterialAlt +
         ") )?(" + (plural_form ? kShapePlAlt : kShapeAlt) + ")";
}

Descriptor descriptor_from_match(const std::string& color,
                                 const std::string& material,
                                 std::string shape_word, bool plural_form) {
  Descriptor d;
  if (!color.empty()) d.color = color_from_string(color);
  if (!material.empty()) d.material = material_from_string(material);
  if (plural_form) shape_word = singular(shape_word);
  if (shape_word != "object") d.shape = shape_from_string(shape_word);
  return d;
}

std::string ti_frame(const std::string& ti) {
  return ti == "when the video starts" ? kFrameStart : kFrameEnd;
}

struct Matcher {
  std::regex query{"What is the (color|shape|material) of the"
                   "(?: (moving|stationary))? " + desc_re(false) +
                   " that is (heavy|light|charged|uncharged)\\?"};
  std::regex exist{"Are there any(?: (heavy|light|charged|uncharged))?"
                   "(?: (moving|stationary))? " + desc_re(true) +
                   "(?: (when the video ends|when the video starts))?\\?"};
  std::regex count{"How many(?: (heavy|light|charged|uncharged))?"
                   "(?: (moving|stationary))? " + desc_re(true) +
                   " are there(?: (when the video ends|when the video starts))?\\?"};
  std::regex mass_compare{"Is the(?: (moving|stationary))? " + desc_re(false) +
                          " (heavier|lighter) than the(?: (moving|stationary))? " +
                          desc_re(false) + "\\?"};
  std::regex charge_opposite{"Are the(?: (moving|stationary))? " +
                             desc_re(false) + " and the(?: (moving|stationary))? " +
                             desc_re(false) + " oppositely charged\\?"};
  std::regex charge_same{"Are the(?: (moving|stationary))? " + desc_re(false) +
                         " and the(?: (moving|stationary))? " + desc_re(false) +
                         " with the same type of charge\\?"};
  std::regex query_both{
      "What are the (colors|shapes|materials) of the two objects that are "
      "charged\\?"};
  std::regex counterfactual{
      "If the " + desc_re(false) +
      " were (lighter|heavier|uncharged|oppositely charged), which of the "
      "following events would (happen|not happen)\\?"};
  std::regex predictive{"Which of the following events will happen next\\?"};
  std::regex choice_collision{"the " + desc_re(false) + " collides with the " +
                              desc_re(false)};
  std::regex choice_attract{"the " + desc_re(false) + " and the " +
                            desc_re(false) + " attract each other"};
  std::regex choice_repel{"the " + desc_re(false) + " and the " +
                          desc_re(false) + " repel each other"};
};

const Matcher& matcher() {
  static const Matcher m;
  return m;
}

}  // namespace

Program parse_question_nl(const std::string& text) {
  const Matcher& m = matcher();
  std::smatch s;

  if (std::regex_match(text, s, m.query)) {
    const Descriptor d = descriptor_from_match(s[3], s[4], s[5], false);
    const std::string da = s[2];
    const std::string chain =
        pa_filter(da_filter(selector_program(d), da, kFrameEnd), s[6]);
    return parse_program("(query_attribute (unique " + chain + ") " +
                         std::string(s[1]) + ")");
  }
  if (std::regex_match(text, s, m.exist) || std::regex_match(text, s, m.count)) {
    const bool exist_form = text.rfind("Are there", 0) == 0;
    const Descriptor d = descriptor_from_match(s[3], s[4], s[5], true);
    const std::string chain = pa_filter(
        da_filter(selector_program(d), s[2], ti_frame(s[6])), s[1]);
    return parse_program((exist_form ? "(exist " : "(count ") + chain + ")");
  }
  if (std::regex_match(text, s, m.mass_compare)) {
    const Descriptor d1 = descriptor_from_match(s[2], s[3], s[4], false);
    const Descriptor d2 = descriptor_from_match(s[7], s[8], s[9], false);
    const std::string op = s[5] == "heavier" ? "is_heavier" : "is_lighter";
    return parse_program(
        "(" + op + " (unique " +
        da_filter(selector_program(d1), s[1], kFrameEnd) + ") (unique " +
        da_filter(selector_program(d2), s[6], kFrameEnd) + "))");
  }
  if (std::regex_match(text, s, m.charge_opposite) ||
      std::regex_match(text, s, m.charge_same)) {
    const bool opposite = text.find("oppositely") != std::string::npos;
    const Descriptor d1 = descriptor_from_match(s[2], s[3], s[4], false);
    const Descriptor d2 = descriptor_from_match(s[6], s[7], s[8], false);
    return parse_program(
        std::string(opposite ? "(is_opposite_charged" : "(is_same_charged") +
        " (unique " + da_filter(selector_program(d1), s[1], kFrameEnd) +
        ") (unique " + da_filter(selector_program(d2), s[5], kFrameEnd) + "))");
  }
  if (std::regex_match(text, s, m.query_both)) {
    return parse_program("(query_both_attribute (filter_charged (objects)) " +
                         singular(s[1]) + ")");
  }
  if (std::regex_match(text, s, m.counterfactual)) {
    const Descriptor d = descriptor_from_match(s[1], s[2], s[3], false);
    const std::string phrase = s[4];
    const std::string op = phrase == "lighter"      ? "counterfactual_mass_light"
                           : phrase == "heavier"    ? "counterfactual_mass_heavy"
                           : phrase == "uncharged" ? "counterfactual_uncharged"
                                                   : "counterfactual_opposite_charged";
    return parse_program("(" + op + " (unique " + selector_program(d) + "))");
  }
  if (std::regex_match(text, s, m.predictive)) {
    return parse_program("(unseen_events)");
  }
  throw std::invalid_argument("unparseable question: " + text);
}

Program parse_choice_nl(const std::string& question_text,
                        const std::string& choice_text) {
  const Matcher& m = matcher();
  std::smatch qs;
  std::string events_expr;
  bool negated = false;
  if (std::regex_match(question_text, qs, m.counterfactual)) {
    events_expr = print_program(parse_question_nl(question_text));
    negated = qs[5] == "not happen";
  } else if (std::regex_match(question_text, qs, m.predictive)) {
    events_expr = "(unseen_events)";
  } else {
    throw std::invalid_argument("question has no choices: " + question_text);
  }

  std::smatch s;
  EventKind kind;
  if (std::regex_match(choice_text, s, m.choice_collision)) {
    kind = EventKind::collision;
  } else if (std::regex_match(choice_text, s, m.choice_attract)) {
    kind = EventKind::attraction;
  } else if (std::regex_match(choice_text, s, m.choice_repel)) {
    kind = EventKind::repulsion;
  } else {
    throw std::invalid_argument("unparseable choice: " + choice_text);
  }
  const Descriptor d1 = descriptor_from_match(s[1], s[2], s[3], false);
  const Descriptor d2 = descriptor_from_match(s[4], s[5], s[6], false);
  std::string p = "(exist (filter_event (filter_event " + events_expr + " " +
                  selector_program(d1) + " " + to_string(kind) + ") " +
                  selector_program(d2) + "))";
  if (negated) p = "(negate " + p + ")";
  return parse_program(p);
}

}  // namespace physq
