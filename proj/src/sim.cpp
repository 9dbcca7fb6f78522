#include "patchnet/sim.hpp"

#include <cmath>
#include <limits>

#include "patchnet/error.hpp"

namespace patchnet {

void SimConfig::validate() const {
  if (!(t_end > 0) || !std::isfinite(t_end)) throw PreconditionError("t_end must be positive");
  if (!(record_dt > 0)) throw PreconditionError("record_dt must be positive");
  if (record_dt > t_end) throw PreconditionError("record_dt must not exceed t_end");
  if (max_events < 1) throw PreconditionError("max_events must be at least 1");
}

double binomial(Tokens n, Tokens k) {
  if (k < 0 || n < k) return 0.0;
  double c = 1.0;
  for (Tokens i = 0; i < k; ++i) c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
  return c;
}

namespace {

double propensity_of(const PetriNet& net, std::span<const Tokens> m, std::size_t t, double rate) {
  double a = rate;
  for (const auto& arc : net.inputs(t)) {
    if (m[arc.place] < arc.weight) return 0.0;
    a *= arc.weight == 1 ? static_cast<double>(m[arc.place]) : binomial(m[arc.place], arc.weight);
  }
  return a;
}

}  // namespace

double propensity(const PetriNet& net, const Marking& m, std::size_t t, double rate) {
  if (t >= net.transition_count())
    throw IdentifierError("unknown transition index " + std::to_string(t));
  return propensity_of(net, m.tokens(), t, rate);
}

double propensity(const PetriNet& net, const Marking& m, std::string_view t, double rate) {
  return propensity(net, m, net.transition_index(t), rate);
}

// ---------------------------------------------------------------- engine

SsaEngine::SsaEngine(const NetDocument& doc, std::uint64_t seed)
    : doc_(doc), rng_(seed), tokens_(doc.marking.tokens().begin(), doc.marking.tokens().end()) {
  doc.validate();
  const std::size_t n = doc.net.transition_count();
  while (leaves_ < n) leaves_ *= 2;
  tree_.assign(2 * leaves_, 0.0);
  for (std::size_t t = 0; t < n; ++t)
    tree_[leaves_ + t] = propensity_of(doc.net, tokens_, t, doc.rates[t]);
  for (std::size_t i = leaves_ - 1; i >= 1; --i) tree_[i] = tree_[2 * i] + tree_[2 * i + 1];
}

void SsaEngine::update(std::size_t t) {
  std::size_t i = leaves_ + t;
  tree_[i] = propensity_of(doc_.net, tokens_, t, doc_.rates[t]);
  // Parents are recomputed from children, so no drift accumulates.
  for (i /= 2; i >= 1; i /= 2) tree_[i] = tree_[2 * i] + tree_[2 * i + 1];
}

std::size_t SsaEngine::select(double target) const {
  std::size_t i = 1;
  while (i < leaves_) {
    if (target < tree_[2 * i]) {
      i = 2 * i;
    } else {
      target -= tree_[2 * i];
      i = 2 * i + 1;
    }
  }
  std::size_t t = i - leaves_;
  // Rounding can land past the last positive leaf; step back to it.
  while (t > 0 && (t >= doc_.net.transition_count() || tree_[leaves_ + t] <= 0)) --t;
  return t;
}

double SsaEngine::next_event_time() {
  const double a = total_propensity();
  if (!(a > 0)) return std::numeric_limits<double>::infinity();
  return time_ + sample_exponential(rng_, 1.0 / a);
}

std::size_t SsaEngine::fire_next(double at) {
  const std::size_t t = select(rng_.uniform() * total_propensity());
  const auto& net = doc_.net;
  for (const auto& a : net.inputs(t)) tokens_[a.place] -= a.weight;
  for (const auto& a : net.outputs(t)) tokens_[a.place] += a.weight;
  time_ = at;
  for (const auto& a : net.inputs(t))
    for (auto u : net.consumers(a.place)) update(u);
  for (const auto& a : net.outputs(t))
    for (auto u : net.consumers(a.place)) update(u);
  return t;
}

Trace simulate_ssa(const NetDocument& doc, const SimConfig& cfg) {
  cfg.validate();
  SsaEngine engine(doc, cfg.seed);
  Trace trace;
  trace.places = doc.net.places();

  const auto last_record = static_cast<std::uint64_t>(std::floor(cfg.t_end / cfg.record_dt + 1e-9));
  std::uint64_t next_record = 0;
  auto record_until = [&](double before) {
    // every record time strictly before `before` sees the current marking
    while (next_record <= last_record) {
      const double rt = static_cast<double>(next_record) * cfg.record_dt;
      if (!(rt < before)) break;
      trace.rows.push_back({rt, engine.tokens()});
      ++next_record;
    }
  };

  while (true) {
    const double at = engine.next_event_time();
    record_until(at);
    if (!(at <= cfg.t_end)) break;
    if (trace.events == cfg.max_events) {
      trace.truncated = true;
      break;
    }
    const auto t = engine.fire_next(at);
    ++trace.events;
    if (cfg.log_firings) trace.firings.push_back({at, t});
  }
  return trace;
}

}  // namespace patchnet
