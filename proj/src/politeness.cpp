#include "camscout/politeness.hpp"

#include <utility>

#include "camscout/error.hpp"

namespace camscout {

PolitenessGate::Permit& PolitenessGate::Permit::operator=(Permit&& other) noexcept {
  if (this != &other) {
    release();
    gate_ = std::exchange(other.gate_, nullptr);
    domain_ = std::move(other.domain_);
    start_ = other.start_;
  }
  return *this;
}

void PolitenessGate::Permit::release() {
  if (gate_) {
    gate_->release(domain_);
    gate_ = nullptr;
  }
}

PolitenessGate::PolitenessGate(Clock& clock, int max_connections)
    : clock_(clock), max_connections_(max_connections) {
  if (max_connections < 1) throw Error(ErrorKind::InvalidConfig, "max_connections must be >= 1");
}

PolitenessGate::Permit PolitenessGate::acquire(const std::string& domain, Duration delay) {
  Timestamp start;
  {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return domains_[domain].active < max_connections_; });
    DomainState& state = domains_[domain];
    start = clock_.now();
    if (state.last_start && *state.last_start + delay > start) start = *state.last_start + delay;
    // Reserve the slot before sleeping so concurrent callers queue behind it.
    state.last_start = start;
    ++state.active;
  }
  clock_.sleep_until(start);
  return Permit(this, domain, start);
}

int PolitenessGate::active(const std::string& domain) const {
  std::lock_guard lock(mu_);
  auto it = domains_.find(domain);
  return it == domains_.end() ? 0 : it->second.active;
}

void PolitenessGate::release(const std::string& domain) {
  {
    std::lock_guard lock(mu_);
    --domains_[domain].active;
  }
  cv_.notify_all();
}

PoliteFetcher::PoliteFetcher(Fetcher& inner, PolitenessGate& gate, DelayPolicy delay_for)
    : inner_(inner), gate_(gate), delay_for_(std::move(delay_for)) {}

RenderedPage PoliteFetcher::fetch(const Url& url, const FetchOptions& options) {
  auto permit = gate_.acquire(default_suffix_table().registrable_domain(url.host), delay_for_(url));
  return inner_.fetch(url, options);
}

StreamCapture PoliteFetcher::open_stream(const Url& url, std::size_t max_bytes, Duration timeout) {
  auto permit = gate_.acquire(default_suffix_table().registrable_domain(url.host), delay_for_(url));
  return inner_.open_stream(url, max_bytes, timeout);
}

}  // namespace camscout
