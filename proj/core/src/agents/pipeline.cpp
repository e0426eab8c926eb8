#include "mesa/agents/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <future>
#include <map>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "mesa/backends/stable_hash.hpp"
#include "mesa/error.hpp"

namespace mesa::agents {
namespace {

struct RoleState {
  AgentTrace trace;
  bool corrected = false;
  bool substituted = false;
};

void run_role(AgentRole role, const AgentInput& in, backends::ChatBackend& backend, const AgentContext& ctx,
              const Correction* correction, AttributeBundle& bundle, AgentTrace& trace) {
  switch (role) {
    case AgentRole::Scene: {
      auto o = run_scene_agent(in, backend, ctx, correction);
      bundle.scene = std::move(o.value);
      trace = std::move(o.trace);
      break;
    }
    case AgentRole::Verb: {
      auto o = run_verb_agent(in, backend, ctx, correction);
      bundle.verb = std::move(o.value);
      trace = std::move(o.trace);
      break;
    }
    case AgentRole::Style: {
      auto o = run_style_agent(in, backend, ctx, correction);
      bundle.style = std::move(o.value);
      trace = std::move(o.trace);
      break;
    }
    case AgentRole::Color: {
      auto o = run_color_agent(in, backend, ctx, correction);
      bundle.color = std::move(o.value);
      trace = std::move(o.trace);
      break;
    }
    case AgentRole::Composition: {
      auto o = run_composition_agent(in, backend, ctx, correction);
      bundle.composition = std::move(o.value);
      trace = std::move(o.trace);
      break;
    }
  }
}

}  // namespace

std::int64_t clip_seed(const std::string& clip_id, std::int64_t seed) {
  return static_cast<std::int64_t>(stable_hash(clip_id, static_cast<std::uint64_t>(seed)) >> 1);
}

PipelineOutput run_pipeline(const AgentInput& input, const PipelineConfig& config, const Lexicon& lexicon,
                            const TemplateSet& templates, const PipelineBackends& backends) {
  require(backends.chat != nullptr, ErrorCode::PreconditionViolated, "pipeline needs a chat backend");
  require(!config.dropped.contains(AgentRole::Scene), ErrorCode::InvalidConfig, "the scene agent cannot be dropped");
  require(!config.generate_images || backends.image, ErrorCode::PreconditionViolated,
          "image generation requested without an image backend");

  AgentContext ctx;
  ctx.lexicon = &lexicon;
  ctx.templates = &templates;
  ctx.tables = config.tables;
  ctx.model = config.model;
  ctx.temperature = config.temperature;
  ctx.seed = config.seed;
  ctx.fallback = config.rule_fallback ? backends.rule : nullptr;

  std::vector<AgentRole> active;
  for (auto role : kAgentRoles) {
    if (!config.dropped.contains(role)) active.push_back(role);
  }

  AttributeBundle bundle;
  std::map<AgentRole, RoleState> state;
  for (auto role : active) state[role];

  auto run_roles = [&](const std::vector<AgentRole>& roles, const std::map<AgentRole, Correction>& corrections,
                       backends::ChatBackend& backend) {
    auto correction_for = [&](AgentRole r) -> const Correction* {
      auto it = corrections.find(r);
      return it == corrections.end() ? nullptr : &it->second;
    };
    if (config.concurrent_agents && roles.size() > 1) {
      std::vector<std::future<void>> futures;
      for (auto role : roles) {
        AgentTrace* trace = &state.at(role).trace;
        const Correction* correction = correction_for(role);
        futures.push_back(std::async(std::launch::async, [&, role, trace, correction] {
          run_role(role, input, backend, ctx, correction, bundle, *trace);
        }));
      }
      // Wait for all before surfacing the first error (in role order).
      for (auto& f : futures) f.wait();
      for (auto& f : futures) f.get();
    } else {
      for (auto role : roles) run_role(role, input, backend, ctx, correction_for(role), bundle, state[role].trace);
    }
  };

  run_roles(active, {}, *backends.chat);
  auto report = validate(bundle, input.va, lexicon, config.tables);
  const bool first_pass = report.passed;

  if (!report.passed) {
    std::map<AgentRole, Correction> corrections;
    std::vector<AgentRole> failing;
    for (auto role : report.roles_with_errors()) {
      if (!state.contains(role)) continue;
      failing.push_back(role);
      corrections[role] = {report.messages_for(role)};
    }
    // Traces of the first attempt are superseded; keep their issues.
    std::map<AgentRole, std::vector<std::string>> earlier;
    for (auto role : failing) earlier[role] = state[role].trace.issues;
    run_roles(failing, corrections, *backends.chat);
    for (auto role : failing) {
      auto& s = state[role];
      s.corrected = true;
      s.trace.issues.insert(s.trace.issues.begin(), earlier[role].begin(), earlier[role].end());
      for (const auto& m : corrections[role].issues) s.trace.issues.push_back("validator: " + m);
    }
    report = validate(bundle, input.va, lexicon, config.tables);
  }

  if (!report.passed) {
    std::vector<AgentRole> failing;
    for (auto role : report.roles_with_errors()) {
      if (state.contains(role)) failing.push_back(role);
    }
    if (backends.rule && !failing.empty()) {
      std::map<AgentRole, std::vector<std::string>> issues;
      for (auto role : failing) issues[role] = state[role].trace.issues;
      AgentContext rule_ctx = ctx;
      rule_ctx.fallback = nullptr;
      for (auto role : failing) {
        run_role(role, input, *backends.rule, rule_ctx, nullptr, bundle, state[role].trace);
        auto& s = state[role];
        s.substituted = true;
        s.corrected = true;
        s.trace.source = "substituted";
        for (const auto& m : report.messages_for(role)) issues[role].push_back("validator: " + m);
        s.trace.issues = std::move(issues[role]);
      }
      report = validate(bundle, input.va, lexicon, config.tables);
    }
    if (!report.passed) {
      std::string msg;
      for (const auto& f : report.flags) {
        if (f.severity == Severity::Error) msg += (msg.empty() ? "" : "; ") + f.message;
      }
      raise(ErrorCode::ValidationUnrecoverable, fmt::format("{}: {}", input.clip_id, msg));
    }
  }

  PipelineOutput out;
  out.clip_id = input.clip_id;
  out.bundle = bundle;
  out.report = report;
  const auto seed = clip_seed(input.clip_id, config.seed);
  out.prompt_set = assemble_prompts(bundle, config.k, seed, lexicon, input.clip_id);

  if (config.generate_images) {
    for (std::size_t i = 0; i < out.prompt_set.prompts.size(); ++i) {
      const auto image_seed = clip_seed(fmt::format("{}#{}", input.clip_id, i), config.seed);
      out.image_refs.push_back(backends::generate_image(*backends.image, out.prompt_set.prompts[i], image_seed,
                                                        config.image_width, config.image_height));
    }
  }

  nlohmann::ordered_json agents = nlohmann::ordered_json::array();
  for (auto role : active) {
    auto j = to_json(state[role].trace);
    j["corrected"] = state[role].corrected;
    j["substituted"] = state[role].substituted;
    agents.push_back(std::move(j));
  }
  std::vector<std::string> dropped;
  for (auto role : config.dropped) dropped.emplace_back(to_string(role));
  out.provenance = {{"seed", config.seed},
                    {"clip_seed", seed},
                    {"k", config.k},
                    {"template_version", templates.version},
                    {"lexicon_version", lexicon.version},
                    {"model", config.model},
                    {"dropped", dropped},
                    {"first_pass_valid", first_pass},
                    {"agents", std::move(agents)}};
  return out;
}

std::vector<PipelineOutput> run_batch(std::span<const AgentInput> inputs, const PipelineConfig& config,
                                      const Lexicon& lexicon, const TemplateSet& templates,
                                      const PipelineBackends& backends, std::size_t workers) {
  std::vector<PipelineOutput> outputs(inputs.size());
  std::vector<std::exception_ptr> errors(inputs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < inputs.size(); i = next++) {
      try {
        outputs[i] = run_pipeline(inputs[i], config, lexicon, templates, backends);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto n = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(inputs.size(), 1));
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < n; ++t) threads.emplace_back(work);
  work();
  for (auto& t : threads) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::stable_sort(outputs.begin(), outputs.end(),
                   [](const PipelineOutput& a, const PipelineOutput& b) { return a.clip_id < b.clip_id; });
  return outputs;
}

nlohmann::ordered_json to_json(const PipelineOutput& output) {
  nlohmann::ordered_json images = nlohmann::ordered_json::array();
  for (const auto& r : output.image_refs) images.push_back(backends::to_json(r));
  return {{"clip_id", output.clip_id},
          {"bundle", to_json(output.bundle)},
          {"report", to_json(output.report)},
          {"prompts", output.prompt_set.prompts},
          {"image_refs", std::move(images)},
          {"provenance", output.provenance}};
}

std::string to_jsonl(const PipelineOutput& output) { return to_json(output).dump(); }

PipelineOutput pipeline_output_from_json(const nlohmann::json& j) {
  try {
    PipelineOutput out;
    out.clip_id = j.at("clip_id").get<std::string>();
    out.bundle = bundle_from_json(j.at("bundle"));
    out.report = report_from_json(j.at("report"));
    out.prompt_set.clip_id = out.clip_id;
    out.prompt_set.prompts = j.at("prompts").get<std::vector<std::string>>();
    out.prompt_set.bundle = out.bundle;
    for (const auto& r : j.at("image_refs")) out.image_refs.push_back(backends::image_result_from_json(r));
    out.provenance = j.at("provenance");
    out.prompt_set.seed = out.provenance.value("clip_seed", std::int64_t{0});
    return out;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::SchemaViolation, std::string("pipeline output: ") + e.what());
  }
}

}  // namespace mesa::agents
