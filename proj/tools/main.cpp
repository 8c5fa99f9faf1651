#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "physq/json_io.hpp"
#include "physq/pipeline.hpp"

namespace fs = std::filesystem;
using namespace physq;

namespace {

constexpr const char* kToolVersion = "0.1.0";

struct ConfigFile {
  PhysicsConfig physics;
  GenConfig generation;
};

ConfigFile load_config(const std::string& path) {
  ConfigFile cfg;
  if (path.empty()) return cfg;
  const json j = read_json_file(path);
  if (j.contains("physics")) {
    const auto& p = j.at("physics");
    cfg.physics.k_coulomb = p.value("k_coulomb", cfg.physics.k_coulomb);
    cfg.physics.dt_substep = p.value("dt_substep", cfg.physics.dt_substep);
    cfg.physics.record_fps = p.value("record_fps", cfg.physics.record_fps);
    cfg.physics.restitution = p.value("restitution", cfg.physics.restitution);
    cfg.physics.arena_half_extent =
        p.value("arena_half_extent", cfg.physics.arena_half_extent);
    cfg.physics.linear_drag = p.value("linear_drag", cfg.physics.linear_drag);
    cfg.physics.interaction_range =
        p.value("interaction_range", cfg.physics.interaction_range);
    cfg.physics.collision_eps =
        p.value("collision_eps", cfg.physics.collision_eps);
    cfg.physics.open_boundary =
        p.value("open_boundary", cfg.physics.open_boundary);
  }
  if (j.contains("generation")) {
    const auto& g = j.at("generation");
    cfg.generation.n_objects_min =
        g.value("n_objects_min", cfg.generation.n_objects_min);
    cfg.generation.n_objects_max =
        g.value("n_objects_max", cfg.generation.n_objects_max);
    cfg.generation.target_duration_s =
        g.value("target_duration_s", cfg.generation.target_duration_s);
    cfg.generation.future_duration_s =
        g.value("future_duration_s", cfg.generation.future_duration_s);
    cfg.generation.ref_duration_s =
        g.value("ref_duration_s", cfg.generation.ref_duration_s);
    cfg.generation.max_resample_attempts = g.value(
        "max_resample_attempts", cfg.generation.max_resample_attempts);
    cfg.generation.speed_min = g.value("speed_min", cfg.generation.speed_min);
    cfg.generation.speed_max = g.value("speed_max", cfg.generation.speed_max);
    cfg.generation.clearance = g.value("clearance", cfg.generation.clearance);
  }
  cfg.physics.validate();
  cfg.generation.validate();
  return cfg;
}

std::string set_filename(std::uint64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "set_%05llu.json",
                static_cast<unsigned long long>(index));
  return buf;
}

std::vector<fs::path> corpus_files(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest.json";
  std::vector<fs::path> files;
  if (fs::exists(manifest_path)) {
    const json manifest = read_json_file(manifest_path);
    for (const auto& name : manifest.at("files")) {
      files.push_back(dir / name.get<std::string>());
    }
  } else {
    for (const auto& entry : fs::directory_iterator(dir)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind("set_", 0) == 0 && entry.path().extension() == ".json") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
  }
  return files;
}

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int cmd_generate(std::uint64_t seed, int sets, const std::string& out_dir,
                 bool complex_mode, const std::string& config_path) {
  ConfigFile cfg = load_config(config_path);
  cfg.generation.seed = seed;
  cfg.generation.complex_mode = complex_mode;
  fs::create_directories(out_dir);

  std::vector<Question> pooled;
  std::vector<CorpusSet> corpus;
  std::vector<std::uint64_t> set_seeds;
  for (int i = 0; i < sets; ++i) {
    corpus.push_back(
        generate_corpus_set(cfg.generation, cfg.physics,
                            static_cast<std::uint64_t>(i)));
    set_seeds.push_back(RngStream::derive(seed, static_cast<std::uint64_t>(i)));
  }
  // corpus-level balancing, then write the trimmed questions back per set
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    for (auto& q : corpus[s].questions) {
      q.id = "s" + std::to_string(s) + "-" + q.id;
      pooled.push_back(q);
    }
  }
  BalanceReport report;
  const auto balanced = balance_corpus(pooled, 10.0, &report);
  std::set<std::string> kept;
  for (const auto& q : balanced) kept.insert(q.id);
  for (auto& cs : corpus) {
    std::vector<Question> filtered;
    for (auto& q : cs.questions) {
      if (kept.count(q.id)) filtered.push_back(q);
    }
    cs.questions = std::move(filtered);
  }

  std::vector<std::string> payloads;
  std::vector<std::string> names;
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    const std::string name = set_filename(s);
    const std::string payload = corpus_set_to_json(corpus[s]).dump() + "\n";
    std::ofstream(fs::path(out_dir) / name, std::ios::binary) << payload;
    payloads.push_back(payload);
    names.push_back(name);
  }

  json manifest = {{"tool_version", kToolVersion},
                   {"seed", seed},
                   {"sets", sets},
                   {"complex", complex_mode},
                   {"set_seeds", set_seeds},
                   {"files", names},
                   {"corpus_checksum", corpus_checksum(payloads)}};
  write_json_file(fs::path(out_dir) / "manifest.json", manifest, 2);

  std::vector<Question> final_pool;
  for (const auto& cs : corpus) {
    for (const auto& q : cs.questions) final_pool.push_back(q);
  }
  json stats = corpus_stats(final_pool);
  stats["balance"] = {{"feasible", report.feasible},
                      {"proportions", report.proportions}};
  write_json_file(fs::path(out_dir) / "stats.json", stats, 2);

  std::cout << "wrote " << sets << " sets to " << out_dir << " (checksum "
            << manifest["corpus_checksum"].get<std::string>() << ")\n";
  return 0;
}

int cmd_infer(const std::string& set_path, const std::string& out_path,
              const std::string& scores_path, const std::string& config_path) {
  const ConfigFile cfg = load_config(config_path);
  const json j = read_json_file(set_path);
  const VideoSet set = j.contains("video_set")
                           ? j.at("video_set").get<VideoSet>()
                           : j.get<VideoSet>();
  const EnumerationResult result = infer_by_enumeration(set, cfg.physics);

  json out = {{"graph", result.graph},
              {"ambiguous", result.ambiguous},
              {"tied_hypotheses", result.tied_count},
              {"best", result.best.signature()}};
  if (out_path.empty()) {
    std::cout << out.dump(2) << "\n";
  } else {
    write_json_file(out_path, out, 2);
  }
  if (!scores_path.empty()) {
    json table = json::array();
    for (const auto& fit : result.ranking) {
      table.push_back({{"hypothesis", fit.hypothesis.signature()},
                       {"per_video", fit.per_video},
                       {"total", fit.total}});
    }
    write_json_file(scores_path, table, 2);
  }
  return 0;
}

int cmd_answer(const std::string& in_dir, const std::string& mode_name,
               const std::string& out_path, const std::string& params_path,
               const std::string& config_path) {
  const ConfigFile cfg = load_config(config_path);
  const AnswerMode mode = answer_mode_from_string(mode_name);
  gnn::GnnBundle bundle;
  if (mode == AnswerMode::gnn) {
    if (params_path.empty()) {
      throw std::runtime_error("--params is required for gnn mode");
    }
    bundle = gnn::checkpoint_from_json(read_json_file(params_path));
  }

  json answers = json::array();
  for (const auto& file : corpus_files(in_dir)) {
    const CorpusSet cs = corpus_set_from_json(read_json_file(file));
    const auto records =
        answer(cs, mode, cfg.physics,
               mode == AnswerMode::gnn ? &bundle : nullptr);
    for (const auto& r : records) answers.push_back(r);
  }
  json out = {{"mode", mode_name}, {"records", answers}};
  if (out_path.empty()) {
    std::cout << out.dump() << "\n";
  } else {
    write_json_file(out_path, out, -1);
    std::cout << "answered " << answers.size() << " questions ("
              << mode_name << " mode)\n";
  }
  return 0;
}

int cmd_eval(const std::string& answers_path, const std::string& out_path) {
  const json j = read_json_file(answers_path);
  const auto records = j.at("records").get<std::vector<AnswerRecord>>();
  const Metrics m = evaluate(records);
  const json out = metrics_to_json(m);
  if (!out_path.empty()) {
    write_json_file(out_path, out, 2);
  }
  std::cout << metrics_table(m);
  return 0;
}

int cmd_exec(const std::string& program_path, const std::string& set_path,
             const std::string& world_path, const std::string& config_path) {
  const ConfigFile cfg = load_config(config_path);
  const std::string program_text = file_bytes(program_path);
  const Program program = parse_program(program_text);

  Value result;
  if (!set_path.empty()) {
    const json j = read_json_file(set_path);
    const CorpusSet cs = j.contains("video_set")
                             ? corpus_set_from_json(j)
                             : CorpusSet{j.get<VideoSet>(), {}};
    // oracle world; counterfactual records built for the ops the program uses
    std::map<int, MassLevel> masses;
    std::map<int, ChargeSign> signs;
    for (const auto& o : cs.set.roster) {
      masses[o.id] = o.mass;
      signs[o.id] = o.charge;
    }
    Question probe;
    probe.program = print_program(program);
    const WorldBundle bundle =
        build_worlds(cs.set, masses, signs, {probe}, cfg.physics);
    result = execute(program, bundle.world());
  } else {
    const json j = read_json_file(world_path);
    const VideoSet set = j.at("set").get<VideoSet>();
    WorldBundle bundle;
    bundle.set = &set;
    bundle.future = j.contains("future") ? j.at("future").get<SceneRecord>()
                                         : set.future;
    if (j.contains("counterfactuals")) {
      for (const auto& entry : j.at("counterfactuals")) {
        bundle.counterfactual[{entry.at("edit").get<std::string>(),
                               entry.at("object").get<int>()}] =
            entry.at("record").get<SceneRecord>();
      }
    }
    if (j.contains("graph")) {
      bundle.props = PropertiesView::from_graph(
          j.at("graph").get<PropertyGraph>(), set.roster);
    } else {
      bundle.props = PropertiesView::from_roster(set.roster);
    }
    result = execute(program, bundle.world());
  }

  json out = {{"type", to_string(type_of(result))}};
  switch (type_of(result)) {
    case ValType::objects:
      out["value"] = std::get<ObjectSetVal>(result).ids;
      break;
    case ValType::events:
      out["value"] = std::get<EventListVal>(result).events;
      break;
    case ValType::event: {
      const auto& e = std::get<EventVal>(result);
      if (e.special == EventVal::Special::none) {
        out["value"] = e.rec;
      } else {
        out["value"] = e.special == EventVal::Special::video_start ? "start"
                                                                   : "end";
      }
      break;
    }
    case ValType::object:
      out["value"] = std::get<ObjectVal>(result).id;
      break;
    default:
      out["value"] = value_to_answer(result);
      break;
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_train(const std::string& in_dir, std::uint64_t seed, int sets,
              const std::string& out_path, int ppl_epochs, int dyn_epochs,
              const std::string& config_path) {
  const ConfigFile cfg = load_config(config_path);
  std::vector<VideoSet> corpus;
  if (!in_dir.empty()) {
    for (const auto& file : corpus_files(in_dir)) {
      corpus.push_back(corpus_set_from_json(read_json_file(file)).set);
    }
  } else {
    GenConfig gcfg = cfg.generation;
    gcfg.seed = seed;
    for (int i = 0; i < sets; ++i) {
      corpus.push_back(generate_video_set(gcfg, cfg.physics,
                                          static_cast<std::uint64_t>(i)));
    }
  }
  gnn::GnnTrainConfig tcfg;
  tcfg.seed = seed;
  if (ppl_epochs > 0) tcfg.ppl_epochs = ppl_epochs;
  if (dyn_epochs > 0) tcfg.dyn_epochs = dyn_epochs;
  const auto bundle = gnn::train(corpus, cfg.physics, tcfg);
  write_json_file(out_path, gnn::checkpoint_to_json(bundle), -1);
  std::cout << "trained on " << corpus.size() << " sets; final losses: "
            << "property " << bundle.ppl_loss.raw.back() << ", dynamics "
            << bundle.dyn_loss.raw.back() << "\n";
  return 0;
}

int cmd_eval_gnn(const std::string& in_dir, std::uint64_t seed, int sets,
                 const std::string& params_path, const std::string& out_path,
                 const std::string& config_path) {
  const ConfigFile cfg = load_config(config_path);
  const auto bundle = gnn::checkpoint_from_json(read_json_file(params_path));
  std::vector<VideoSet> corpus;
  if (!in_dir.empty()) {
    for (const auto& file : corpus_files(in_dir)) {
      corpus.push_back(corpus_set_from_json(read_json_file(file)).set);
    }
  } else {
    GenConfig gcfg = cfg.generation;
    gcfg.seed = seed;
    for (int i = 0; i < sets; ++i) {
      corpus.push_back(generate_video_set(gcfg, cfg.physics,
                                          static_cast<std::uint64_t>(i)));
    }
  }
  const auto eval =
      gnn::evaluate_ppl(corpus, bundle.ppl, cfg.physics.arena_half_extent);
  const json out = {{"mass_accuracy", eval.mass_accuracy},
                    {"edge_accuracy", eval.edge_accuracy},
                    {"nodes", eval.nodes},
                    {"edges", eval.edges}};
  if (!out_path.empty()) write_json_file(out_path, out, 2);
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_dump_csv(const std::string& set_path, const std::string& which,
                 const std::string& out_path) {
  const json j = read_json_file(set_path);
  const VideoSet set = j.contains("video_set")
                           ? j.at("video_set").get<VideoSet>()
                           : j.get<VideoSet>();
  const SceneRecord* rec = nullptr;
  if (which == "target") rec = &set.target;
  if (which == "future") rec = &set.future;
  for (int r = 0; r < 4; ++r) {
    if (which == "ref" + std::to_string(r)) {
      rec = &set.references[static_cast<std::size_t>(r)];
    }
  }
  if (!rec) throw std::runtime_error("unknown record name: " + which);
  std::ofstream out(out_path);
  out << "frame,id,x,y,vx,vy\n";
  out.precision(17);
  for (int f = 0; f < rec->frame_count(); ++f) {
    for (std::size_t i = 0; i < rec->objects.size(); ++i) {
      const auto& st = rec->frames[static_cast<std::size_t>(f)][i];
      out << f << "," << rec->objects[i].id << "," << st.position.x << ","
          << st.position.y << "," << st.velocity.x << "," << st.velocity.y
          << "\n";
    }
  }
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"physical reasoning problem sets: generation, hidden-property "
               "inference and symbolic question answering"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file");

  auto* gen = app.add_subcommand("generate", "generate problem sets");
  std::uint64_t gen_seed = 1;
  int gen_sets = 10;
  std::string gen_out = "corpus";
  bool gen_complex = false;
  gen->add_option("--seed", gen_seed, "root seed");
  gen->add_option("--sets", gen_sets, "number of sets");
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_flag("--complex", gen_complex, "6-8 objects with both properties");

  auto* inf = app.add_subcommand("infer", "infer hidden properties of one set");
  std::string inf_set, inf_out, inf_scores;
  inf->add_option("--set", inf_set, "problem set JSON")->required();
  inf->add_option("--out", inf_out, "property graph output path");
  inf->add_option("--scores", inf_scores, "per-hypothesis score table path");

  auto* ans = app.add_subcommand("answer", "answer a corpus of questions");
  std::string ans_in, ans_mode = "oracle", ans_out, ans_params;
  ans->add_option("--in", ans_in, "corpus directory")->required();
  ans->add_option("--mode", ans_mode, "oracle | inferred | gnn");
  ans->add_option("--out", ans_out, "answers JSON path");
  ans->add_option("--params", ans_params, "trained checkpoint (gnn mode)");

  auto* evl = app.add_subcommand("eval", "score an answers file");
  std::string evl_answers, evl_out;
  evl->add_option("--answers", evl_answers, "answers JSON")->required();
  evl->add_option("--out", evl_out, "metrics JSON path");

  auto* exc = app.add_subcommand("exec", "run a program against a world");
  std::string exc_program, exc_set, exc_world;
  exc->add_option("--program", exc_program, "program text file")->required();
  exc->add_option("--set", exc_set, "problem set JSON (oracle world)");
  exc->add_option("--world", exc_world, "explicit world JSON");

  auto* trn = app.add_subcommand("train", "train the learned components");
  std::string trn_in, trn_out = "checkpoint.json";
  std::uint64_t trn_seed = 1;
  int trn_sets = 60, trn_ppl_epochs = 0, trn_dyn_epochs = 0;
  trn->add_option("--in", trn_in, "corpus directory (else self-generate)");
  trn->add_option("--seed", trn_seed, "seed (and corpus seed when generating)");
  trn->add_option("--sets", trn_sets, "sets to self-generate");
  trn->add_option("--out", trn_out, "checkpoint path");
  trn->add_option("--ppl-epochs", trn_ppl_epochs, "property learner epochs");
  trn->add_option("--dyn-epochs", trn_dyn_epochs, "dynamics epochs");

  auto* evg = app.add_subcommand("eval-gnn", "score trained property heads");
  std::string evg_in, evg_params, evg_out;
  std::uint64_t evg_seed = 100;
  int evg_sets = 20;
  evg->add_option("--in", evg_in, "corpus directory (else self-generate)");
  evg->add_option("--seed", evg_seed, "seed for self-generated eval corpus");
  evg->add_option("--sets", evg_sets, "sets to self-generate");
  evg->add_option("--params", evg_params, "trained checkpoint")->required();
  evg->add_option("--out", evg_out, "report path");

  auto* csv = app.add_subcommand("dump-csv", "per-frame trajectory CSV");
  std::string csv_set, csv_which = "target", csv_out;
  csv->add_option("--set", csv_set, "problem set JSON")->required();
  csv->add_option("--record", csv_which, "target | future | ref0..ref3");
  csv->add_option("--out", csv_out, "CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      return cmd_generate(gen_seed, gen_sets, gen_out, gen_complex, config_path);
    }
    if (inf->parsed()) {
      return cmd_infer(inf_set, inf_out, inf_scores, config_path);
    }
    if (ans->parsed()) {
      return cmd_answer(ans_in, ans_mode, ans_out, ans_params, config_path);
    }
    if (evl->parsed()) return cmd_eval(evl_answers, evl_out);
    if (exc->parsed()) {
      if (exc_set.empty() && exc_world.empty()) {
        throw std::runtime_error("exec needs --set or --world");
      }
      return cmd_exec(exc_program, exc_set, exc_world, config_path);
    }
    if (trn->parsed()) {
      return cmd_train(trn_in, trn_seed, trn_sets, trn_out, trn_ppl_epochs,
                       trn_dyn_epochs, config_path);
    }
    if (evg->parsed()) {
      return cmd_eval_gnn(evg_in, evg_seed, evg_sets, evg_params, evg_out,
                          config_path);
    }
    if (csv->parsed()) return cmd_dump_csv(csv_set, csv_which, csv_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
