// Copyright 2026 The papir authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <thread>

#include "doctest.h"
#include "helpers.hpp"
#include "papir/netproto.hpp"

using namespace papir;
using namespace papir::net;
using namespace papir::test;

TEST_CASE("query payload layout") {
  PartitionQuery pq = PartitionQuery::canonical({{1, 2}, {3, 5}, {4, 6}});
  auto payload = encode_query_payload(Query{pq});
  CHECK(payload.size() == 4 + 12);  // header u16s + 6 u16 indices
  CHECK(payload[0] == 0);
  CHECK(payload[1] == 6);  // K
  CHECK(payload[2] == 0);
  CHECK(payload[3] == 1);  // M
  Query decoded = decode_query_payload(FrameKind::query_partition, payload);
  CHECK(std::get<PartitionQuery>(decoded) == pq);

  MdsQuery mq{3, 1, 7, {0, 1, 2}};
  auto mpayload = encode_query_payload(Query{mq});
  CHECK(mpayload.size() == 36);
  Query mdecoded = decode_query_payload(FrameKind::query_mds, mpayload);
  CHECK(std::get<MdsQuery>(mdecoded) == mq);
}

TEST_CASE("random queries survive the wire round-trip") {
  Rng rng(314);
  int checked = 0;
  while (checked < 1000) {
    if (rng.below(2) == 0) {
      std::uint32_t m = 1 + static_cast<std::uint32_t>(rng.below(3));
      std::uint32_t n_parts = m + 2 + static_cast<std::uint32_t>(rng.below(3));
      std::uint32_t k = n_parts * (m + 1);
      if (!ProblemParams::with_default_field(k, m).rcs_supported()) continue;
      ProblemParams params = ProblemParams::with_default_field(k, m);
      MessageIndex w = static_cast<MessageIndex>(rng.below(k)) + 1;
      IndexSet s;
      while (s.size() < m) {
        MessageIndex c = static_cast<MessageIndex>(rng.below(k)) + 1;
        if (c != w && !set_contains(s, c)) s = make_index_set([&] {
              auto v = s;
              v.push_back(c);
              return v;
            }());
      }
      PcQuery pc = pc_build_query(params, w, s, rng.next_u64());
      Query q{pc.query};
      Query rt = decode_query_payload(query_frame_kind(q), encode_query_payload(q));
      CHECK(std::get<PartitionQuery>(rt) == pc.query);
    } else {
      std::uint32_t k = 2 + static_cast<std::uint32_t>(rng.below(20));
      std::uint32_t m = 1 + static_cast<std::uint32_t>(rng.below(k - 1));
      std::uint64_t q_mod = smallest_prime_at_least(k + rng.below(50));
      MdsQuery mq{k, m, q_mod, {}};
      while (mq.omegas.size() < k) {
        std::uint64_t w = rng.below(q_mod);
        if (std::find(mq.omegas.begin(), mq.omegas.end(), w) == mq.omegas.end()) {
          mq.omegas.push_back(w);
        }
      }
      Query q{mq};
      Query rt = decode_query_payload(query_frame_kind(q), encode_query_payload(q));
      CHECK(std::get<MdsQuery>(rt) == mq);
    }
    ++checked;
  }
}

TEST_CASE("answers survive the wire round-trip") {
  Rng rng(1618);
  for (int trial = 0; trial < 200; ++trial) {
    std::uint64_t q = smallest_prime_at_least(3 + rng.below(100));
    PrimeField f(q);
    Answer a;
    std::size_t combos = 1 + rng.below(6);
    std::size_t n = 1 + rng.below(5);
    for (std::size_t c = 0; c < combos; ++c) a.combos.push_back(MessageVector::random(n, f, rng));
    Answer rt = decode_answer_payload(encode_answer_payload(a));
    CHECK(rt == a);
  }
}

TEST_CASE("malformed payloads are rejected") {
  PartitionQuery pq = PartitionQuery::canonical({{1, 2}, {3, 5}, {4, 6}});
  auto payload = encode_query_payload(Query{pq});
  auto truncated = payload;
  truncated.pop_back();
  CHECK_THROWS_AS(decode_query_payload(FrameKind::query_partition, truncated), protocol_error);
  auto trailing = payload;
  trailing.push_back(0);
  CHECK_THROWS_AS(decode_query_payload(FrameKind::query_partition, trailing), protocol_error);
  CHECK_THROWS_AS(decode_query_payload(FrameKind::answer, payload), protocol_error);

  // Non-canonical part order is a wire violation.
  auto swapped = payload;
  std::swap(swapped[4], swapped[8]);
  std::swap(swapped[5], swapped[9]);
  CHECK_THROWS_AS(decode_query_payload(FrameKind::query_partition, swapped), protocol_error);

  // Out-of-range wire ids are an encoding error.
  PartitionQuery big;
  big.parts = {{1, 70000}, {2, 3}};
  CHECK_THROWS_AS(encode_query_payload(Query{big}), usage_error);
}

TEST_CASE("dataset files round-trip") {
  ProblemParams params = ProblemParams::make(6, 1, 7, 3);
  Dataset data = Dataset::random(params, 5);
  const char* path = "netproto_dataset_test.bin";
  write_dataset_file(path, data);
  Dataset loaded = read_dataset_file(path);
  CHECK(loaded.k() == 6);
  CHECK(loaded.n() == 3);
  CHECK(loaded.q() == 7);
  for (MessageIndex i = 1; i <= 6; ++i) CHECK(loaded.message(i) == data.message(i));

  // Trailing garbage is rejected.
  {
    std::FILE* f = std::fopen(path, "ab");
    std::fputc(0, f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(read_dataset_file(path), io_error);
  std::remove(path);
  CHECK_THROWS_AS(read_dataset_file("missing_dataset.bin"), io_error);
}

TEST_CASE("side information files round-trip") {
  ProblemParams params = ProblemParams::make(6, 1, 7, 3);
  Dataset data = Dataset::random(params, 6);
  SideInfo side = side_info_from_dataset(data, {2, 5});
  const char* path = "netproto_sideinfo_test.bin";
  write_side_info_file(path, side, 3, 7);
  SideInfo loaded = read_side_info_file(path);
  CHECK(loaded.size() == 2);
  CHECK(loaded.at(2) == data.message(2));
  CHECK(loaded.at(5) == data.message(5));
  std::remove(path);
}

namespace {

// Guard that always stops the server, test failures included.
struct ServerGuard {
  Server server;
  ~ServerGuard() { server.stop(); }
};

int raw_connect(std::uint16_t port) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  REQUIRE(fd >= 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  REQUIRE(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
  return fd;
}

std::vector<std::uint8_t> raw_exchange(std::uint16_t port, const std::vector<std::uint8_t>& bytes,
                                       std::size_t reply_cap = 4096) {
  int fd = raw_connect(port);
  REQUIRE(::write(fd, bytes.data(), bytes.size()) == static_cast<ssize_t>(bytes.size()));
  std::vector<std::uint8_t> reply;
  std::uint8_t buf[512];
  for (;;) {
    ssize_t r = ::read(fd, buf, sizeof buf);
    if (r <= 0) break;
    reply.insert(reply.end(), buf, buf + r);
    if (reply.size() >= reply_cap) break;
  }
  ::close(fd);
  return reply;
}

}  // namespace

TEST_CASE("loopback fetch decodes both schemes") {
  ProblemParams params = ProblemParams::make(6, 1, 7, 4);
  Dataset data = Dataset::random(params, 77);
  ServerGuard guard;
  guard.server.start(data);
  std::uint16_t port = guard.server.port();

  PopularityProfile uniform = PopularityProfile::uniform(6);
  SideInfo side = side_info_from_dataset(data, {2});

  // Uniform popularity always takes the partition scheme.
  for (int i = 0; i < 20; ++i) {
    FetchResult r = fetch(uniform, params, 1, {2}, side, "127.0.0.1", port, derive_seed(1, i));
    CHECK(r.scheme == SchemeKind::partition_and_code);
    CHECK(r.download_units == 3);
    CHECK(r.message == data.message(1));
    CHECK(r.answer_payload_bytes == 2 + 2 + 8 + 3 * 4 * 8);
  }

  // A skewed profile reaches the coded branch on some seed.
  PopularityProfile skew = skewed_profile();
  bool saw_mds = false, saw_pc = false;
  for (int i = 0; i < 400 && !(saw_mds && saw_pc); ++i) {
    FetchResult r = fetch(skew, params, 1, {2}, side, "127.0.0.1", port, derive_seed(2, i));
    CHECK(r.message == data.message(1));
    if (r.scheme == SchemeKind::mds_code) {
      saw_mds = true;
      CHECK(r.download_units == 5);
    } else {
      saw_pc = true;
      CHECK(r.download_units == 3);
    }
  }
  CHECK(saw_mds);
  CHECK(saw_pc);
}

TEST_CASE("two concurrent clients both decode correctly") {
  ProblemParams params = ProblemParams::make(6, 1, 7, 2);
  Dataset data = Dataset::random(params, 88);
  ServerGuard guard;
  guard.server.start(data);
  std::uint16_t port = guard.server.port();
  PopularityProfile uniform = PopularityProfile::uniform(6);

  auto client = [&](MessageIndex w, MessageIndex s, int* failures) {
    SideInfo side = side_info_from_dataset(data, {s});
    for (int i = 0; i < 50; ++i) {
      FetchResult r = fetch(uniform, params, w, {s}, side, "127.0.0.1", port,
                            derive_seed(w * 1000, i));
      if (!(r.message == data.message(w))) ++*failures;
    }
  };
  int fail1 = 0, fail2 = 0;
  std::thread t1(client, 1, 2, &fail1);
  std::thread t2(client, 4, 6, &fail2);
  t1.join();
  t2.join();
  CHECK(fail1 == 0);
  CHECK(fail2 == 0);
}

TEST_CASE("server rejects malformed and mismatched requests") {
  ProblemParams params = ProblemParams::make(6, 1, 7, 2);
  Dataset data = Dataset::random(params, 99);
  ServerGuard guard;
  guard.server.start(data);
  std::uint16_t port = guard.server.port();

  // Unknown tag 0x7F: error frame, reason malformed.
  auto reply = raw_exchange(port, {0x7F, 0, 0, 0, 0});
  REQUIRE(reply.size() == 6);
  CHECK(reply[0] == 0x04);
  CHECK(reply[5] == 0x01);

  // Oversized declared length: error frame, reason oversized.
  reply = raw_exchange(port, {0x01, 0x7F, 0xFF, 0xFF, 0xFF});
  REQUIRE(reply.size() == 6);
  CHECK(reply[0] == 0x04);
  CHECK(reply[5] == 0x03);

  // Structurally valid query for the wrong K: error frame, reason unsupported.
  MdsQuery wrong_k{8, 1, 11, {0, 1, 2, 3, 4, 5, 6, 7}};
  auto frame = frame_bytes(FrameKind::query_mds, encode_query_payload(Query{wrong_k}));
  reply = raw_exchange(port, frame);
  REQUIRE(reply.size() == 6);
  CHECK(reply[0] == 0x04);
  CHECK(reply[5] == 0x02);

  // fetch() surfaces the rejection as a protocol error: a client configured
  // for K=8 sends a partition of [8] that the K=6 server refuses.
  PopularityProfile uniform8 = PopularityProfile::uniform(8);
  ProblemParams eight = ProblemParams::make(8, 1, 11, 2);
  PrimeField f11(11);
  Rng side_rng(5);
  SideInfo side8;
  side8.emplace(2, MessageVector::random(2, f11, side_rng));
  CHECK_THROWS_AS(fetch(uniform8, eight, 1, {2}, side8, "127.0.0.1", port, 1),
                  protocol_error);
}

TEST_CASE("client rejects truncated and inconsistent answers") {
  // A fake server that sends back whatever we tell it to.
  auto fake_server = [](const std::vector<std::uint8_t>& reply, std::uint16_t* port_out,
                        std::thread& worker) {
    int ls = ::socket(AF_INET, SOCK_STREAM, 0);
    REQUIRE(ls >= 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    REQUIRE(::bind(ls, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
    socklen_t len = sizeof addr;
    ::getsockname(ls, reinterpret_cast<sockaddr*>(&addr), &len);
    *port_out = ntohs(addr.sin_port);
    REQUIRE(::listen(ls, 1) == 0);
    worker = std::thread([ls, reply] {
      int fd = ::accept(ls, nullptr, nullptr);
      if (fd >= 0) {
        std::uint8_t sink[4096];
        ssize_t ignored = ::read(fd, sink, sizeof sink);  // consume the query
        ignored = ::write(fd, reply.data(), reply.size());
        (void)ignored;
        ::close(fd);
      }
      ::close(ls);
    });
  };

  ProblemParams params = ProblemParams::make(6, 1, 7, 2);
  PopularityProfile uniform = PopularityProfile::uniform(6);
  PrimeField f(7);
  Rng rng(7);
  SideInfo side;
  side.emplace(2, MessageVector::random(2, f, rng));

  // Wrong combo count (2 instead of 3): decode inconsistency.
  {
    Answer short_answer;
    short_answer.combos = {MessageVector::random(2, f, rng), MessageVector::random(2, f, rng)};
    auto frame = frame_bytes(FrameKind::answer, encode_answer_payload(short_answer));
    std::uint16_t port = 0;
    std::thread worker;
    fake_server(frame, &port, worker);
    CHECK_THROWS_AS(fetch(uniform, params, 1, {2}, side, "127.0.0.1", port, 3), decode_error);
    worker.join();
  }

  // Frame cut off mid-payload: protocol error, no partial result.
  {
    Answer good;
    good.combos = {MessageVector::random(2, f, rng), MessageVector::random(2, f, rng),
                   MessageVector::random(2, f, rng)};
    auto frame = frame_bytes(FrameKind::answer, encode_answer_payload(good));
    frame.resize(frame.size() / 2);
    std::uint16_t port = 0;
    std::thread worker;
    fake_server(frame, &port, worker);
    CHECK_THROWS_AS(fetch(uniform, params, 1, {2}, side, "127.0.0.1", port, 3), protocol_error);
    worker.join();
  }

  // Nobody listening: network error.
  CHECK_THROWS_AS(fetch(uniform, params, 1, {2}, side, "127.0.0.1", 1, 3), net_error);
}

TEST_CASE("server restarts cleanly and rejects double starts") {
  ProblemParams params = ProblemParams::make(6, 1, 7, 1);
  Dataset data = Dataset::random(params, 55);
  PopularityProfile uniform = PopularityProfile::uniform(6);
  SideInfo side = side_info_from_dataset(data, {3});

  Server server;
  server.start(data);
  CHECK_THROWS_AS(server.start(data), usage_error);
  std::uint16_t first_port = server.port();
  FetchResult r1 = fetch(uniform, params, 2, {3}, side, "127.0.0.1", first_port, 1);
  CHECK(r1.message == data.message(2));
  server.stop();
  CHECK_THROWS_AS(fetch(uniform, params, 2, {3}, side, "127.0.0.1", first_port, 1), net_error);

  server.start(data);
  FetchResult r2 = fetch(uniform, params, 2, {3}, side, "127.0.0.1", server.port(), 2);
  CHECK(r2.message == data.message(2));
  server.stop();
}

TEST_CASE("fetch selects the coded scheme at the calibrated frequency") {
  ProblemParams params = ProblemParams::make(6, 1, 7, 1);
  Dataset data = Dataset::random(params, 2626);
  ServerGuard guard;
  guard.server.start(data);
  std::uint16_t port = guard.server.port();

  PopularityProfile skew = skewed_profile();
  SideInfo side = side_info_from_dataset(data, {2});

  const int rounds = 26000;
  int mds_rounds = 0;
  for (int i = 0; i < rounds; ++i) {
    // Ephemeral ports can momentarily run dry at this connection rate;
    // back off and retry instead of failing the round.
    for (int attempt = 0;; ++attempt) {
      try {
        FetchResult r =
            fetch(skew, params, 1, {2}, side, "127.0.0.1", port, derive_seed(2626, i));
        REQUIRE(r.message == data.message(1));
        if (r.scheme == SchemeKind::mds_code) ++mds_rounds;
        break;
      } catch (const net_error&) {
        REQUIRE(attempt < 50);
        std::this_thread::sleep_for(std::chrono::milliseconds(200));
      }
    }
  }
  double p = 1.0 / 26;
  double sigma = std::sqrt(rounds * p * (1 - p));
  CHECK(std::abs(mds_rounds - rounds * p) < 3 * sigma);
}

TEST_CASE("query bytes depend only on the query value") {
  // The same canonical partition arising from different demands encodes to
  // identical bytes.
  ProblemParams params = ProblemParams::make(6, 1, 7, 1);
  std::vector<std::uint8_t> from_w1, from_w2;
  for (int i = 0; i < 200 && (from_w1.empty() || from_w2.empty()); ++i) {
    PcQuery a = pc_build_query(params, 1, {2}, derive_seed(71, i));
    if (a.query.parts[1] == IndexSet{3, 4}) from_w1 = encode_query_payload(Query{a.query});
    PcQuery b = pc_build_query(params, 2, {1}, derive_seed(72, i));
    if (b.query.parts[1] == IndexSet{3, 4}) from_w2 = encode_query_payload(Query{b.query});
  }
  REQUIRE(!from_w1.empty());
  REQUIRE(!from_w2.empty());
  CHECK(from_w1 == from_w2);

  // The coded query never looks at (W, S) at all.
  MdsQuery m1 = mds_build_query(params);
  MdsQuery m2 = mds_build_query(params);
  CHECK(encode_query_payload(Query{m1}) == encode_query_payload(Query{m2}));
}
