#pragma once

#include <string>
#include <vector>

#include "physq/program.hpp"
#include "physq/rng.hpp"

namespace physq::testing {

// Random well-typed program text for round-trip and type-soundness checks.
// Grows an expression tree of the requested result type from the op table.
class ProgramSampler {
 public:
  explicit ProgramSampler(std::uint64_t seed) : rng_(seed) {}

  std::string sample() {
    static const ValType roots[] = {ValType::boolean, ValType::integer,
                                    ValType::attribute, ValType::string,
                                    ValType::objects, ValType::events};
    return grow(roots[static_cast<std::size_t>(rng_.uniform_int(0, 5))], 0);
  }

 private:
  std::string literal_for(LitClass c) {
    auto pick = [&](std::initializer_list<const char*> words) {
      std::vector<const char*> v(words);
      return std::string(v[static_cast<std::size_t>(
          rng_.uniform_int(0, static_cast<int>(v.size()) - 1))]);
    };
    switch (c) {
      case LitClass::static_attr:
        return pick({"gray", "red", "blue", "green", "brown", "cyan", "purple",
                     "yellow", "cube", "sphere", "cylinder", "metal", "rubber"});
      case LitClass::dynamic_attr:
        return pick({"moving", "stationary"});
      case LitClass::order:
        return pick({"first", "second", "last"});
      case LitClass::event_kind:
        return pick({"in", "out", "collision", "attraction", "repulsion"});
      case LitClass::head_attr:
        return pick({"color", "shape", "material"});
    }
    return "color";
  }

  std::string grow(ValType want, int depth) {
    // candidate ops producing the wanted type
    std::vector<const OpSig*> options;
    for (const auto& sig : op_table()) {
      ValType produces = sig.ret;
      if (sig.polymorphic) {
        // unique produces object or event depending on input
        if (want == ValType::object || want == ValType::event) {
          options.push_back(&sig);
        }
        continue;
      }
      if (produces == want) options.push_back(&sig);
    }
    // deep trees get steered toward the shallowest available op
    const OpSig* sig = nullptr;
    if (depth > 4) {
      auto value_args = [](const OpSig* s) {
        int n = 0;
        for (const auto& a : s->args) n += a.is_literal ? 0 : 1;
        return n;
      };
      sig = options.front();
      for (const auto* s : options) {
        if (value_args(s) < value_args(sig)) sig = s;
      }
    }
    if (!sig) {
      sig = options[static_cast<std::size_t>(
          rng_.uniform_int(0, static_cast<int>(options.size()) - 1))];
    }

    std::string out = "(" + sig->name;
    bool first_arg_type_set = false;
    ValType unique_input = ValType::objects;
    for (const auto& arg : sig->args) {
      if (arg.is_literal) {
        if (arg.optional && rng_.bernoulli(0.5)) continue;
        out += " " + literal_for(arg.lit);
        continue;
      }
      ValType t;
      if (arg.types.size() > 1) {
        if (sig->polymorphic && !first_arg_type_set) {
          t = want == ValType::object ? ValType::objects : ValType::events;
          unique_input = t;
          (void)unique_input;
        } else {
          t = arg.types[static_cast<std::size_t>(
              rng_.uniform_int(0, static_cast<int>(arg.types.size()) - 1))];
        }
      } else {
        t = arg.types[0];
      }
      first_arg_type_set = true;
      if (t == ValType::frame && rng_.bernoulli(0.3)) {
        out += " " + std::to_string(rng_.uniform_int(0, 20));
      } else {
        out += " " + grow(t, depth + 1);
      }
    }
    out += ")";
    return out;
  }

  RngStream rng_;
};

}  // namespace physq::testing
