#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>
#include <vector>

#include "camscout/error.hpp"
#include "camscout/fixture.hpp"
#include "camscout/politeness.hpp"

using namespace camscout;
using namespace std::chrono_literals;

TEST_CASE("the 33rd concurrent request waits for a free slot") {
  VirtualClock clock;
  PolitenessGate gate(clock, 32);
  std::vector<PolitenessGate::Permit> held;
  for (int i = 0; i < 32; ++i) held.push_back(gate.acquire("x.test", Duration{0}));
  CHECK(gate.active("x.test") == 32);

  std::atomic<bool> got{false};
  std::thread extra([&] {
    auto permit = gate.acquire("x.test", Duration{0});
    got = true;
  });
  std::this_thread::sleep_for(100ms);
  CHECK_FALSE(got.load());
  // Another domain is not affected.
  auto other = gate.acquire("y.test", Duration{0});
  CHECK(gate.active("y.test") == 1);

  held.pop_back();
  extra.join();
  CHECK(got.load());
  CHECK(gate.active("x.test") == 31);
}

TEST_CASE("request starts on one domain are spaced by the delay") {
  VirtualClock clock;
  const Timestamp t0 = clock.now();
  PolitenessGate gate(clock, 32);
  std::vector<Timestamp> starts;
  for (int i = 0; i < 5; ++i) starts.push_back(gate.acquire("x.test", 3s).start());
  CHECK(starts[0] == t0);
  for (std::size_t i = 1; i < starts.size(); ++i) CHECK(starts[i] - starts[i - 1] == Duration{3'000});
  CHECK(clock.now() == t0 + Duration{12'000});
}

TEST_CASE("different domains are not delayed by each other") {
  VirtualClock clock;
  const Timestamp t0 = clock.now();
  PolitenessGate gate(clock, 32);
  CHECK(gate.acquire("a.test", 3s).start() == t0);
  CHECK(gate.acquire("b.test", 3s).start() == t0);
  CHECK(gate.acquire("c.test", 3s).start() == t0);
  CHECK(gate.acquire("a.test", 3s).start() == t0 + Duration{3'000});
}

TEST_CASE("concurrent requests still respect the spacing") {
  SystemClock clock;
  PolitenessGate gate(clock, 4);
  std::mutex mu;
  std::vector<Timestamp> starts;
  std::vector<std::thread> threads;
  for (int i = 0; i < 6; ++i)
    threads.emplace_back([&] {
      auto permit = gate.acquire("x.test", 30ms);
      std::lock_guard lock(mu);
      starts.push_back(permit.start());
    });
  for (auto& t : threads) t.join();
  std::sort(starts.begin(), starts.end());
  for (std::size_t i = 1; i < starts.size(); ++i) CHECK(starts[i] - starts[i - 1] >= Duration{30});
}

TEST_CASE("PoliteFetcher keys the gate on the registrable domain") {
  VirtualClock clock;
  const Timestamp t0 = clock.now();
  FixtureFetcher inner(clock, nlohmann::json{{"resources", nlohmann::json::object()}});
  PolitenessGate gate(clock, 32);
  PoliteFetcher polite(inner, gate, [](const Url&) { return Duration{3'000}; });
  polite.fetch(Url::parse("http://www.hub.test/a"), {});
  polite.fetch(Url::parse("http://cams.hub.test/b"), {});
  polite.fetch(Url::parse("http://other.test/c"), {});
  auto calls = inner.calls();
  REQUIRE(calls.size() == 3);
  CHECK(calls[0].at == t0);
  CHECK(calls[1].at == t0 + Duration{3'000});
  CHECK(calls[2].at == t0 + Duration{3'000});  // gate is free; only the clock moved
}

TEST_CASE("a gate needs at least one slot") {
  VirtualClock clock;
  CHECK_THROWS_AS(PolitenessGate(clock, 0), Error);
}
