#pragma once

#include <condition_variable>
#include <functional>
#include <map>
#include <mutex>
#include <string>

#include "camscout/clock.hpp"
#include "camscout/fetcher.hpp"

namespace camscout {

// Per-domain admission control: at most `max_connections` requests in flight
// and request starts spaced by at least the delay passed to acquire().
class PolitenessGate {
 public:
  class Permit {
   public:
    Permit() = default;
    Permit(Permit&& other) noexcept { *this = std::move(other); }
    Permit& operator=(Permit&& other) noexcept;
    Permit(const Permit&) = delete;
    Permit& operator=(const Permit&) = delete;
    ~Permit() { release(); }

    void release();
    Timestamp start() const { return start_; }

   private:
    friend class PolitenessGate;
    Permit(PolitenessGate* gate, std::string domain, Timestamp start)
        : gate_(gate), domain_(std::move(domain)), start_(start) {}
    PolitenessGate* gate_ = nullptr;
    std::string domain_;
    Timestamp start_{};
  };

  PolitenessGate(Clock& clock, int max_connections);

  // Blocks until a connection slot is free and `delay` has passed since the
  // previous request start on `domain`.
  Permit acquire(const std::string& domain, Duration delay);

  int active(const std::string& domain) const;
  int max_connections() const { return max_connections_; }

 private:
  struct DomainState {
    int active = 0;
    std::optional<Timestamp> last_start;
  };
  void release(const std::string& domain);

  Clock& clock_;
  const int max_connections_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::map<std::string, DomainState> domains_;
};

// Fetcher decorator that routes every request through a PolitenessGate,
// keyed on the registrable domain of the URL.
class PoliteFetcher final : public Fetcher {
 public:
  using DelayPolicy = std::function<Duration(const Url&)>;

  PoliteFetcher(Fetcher& inner, PolitenessGate& gate, DelayPolicy delay_for);

  RenderedPage fetch(const Url& url, const FetchOptions& options) override;
  StreamCapture open_stream(const Url& url, std::size_t max_bytes, Duration timeout) override;

 private:
  Fetcher& inner_;
  PolitenessGate& gate_;
  DelayPolicy delay_for_;
};

}  // namespace camscout
