#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qcv/errors.hpp"
#include "qcv/protocol.hpp"

namespace qcv {

// Wire framing, fixed bit-exactly:
//
//   frame   := u32be payload_length, payload
//   payload := u8 message_type, body
//
//   type 0x01 CenterToProver      body: u8 h, u32be n, n x u8 m_j
//   type 0x02 CenterToVerifierMain body: u8 h, u32be n, n x u8 m_j
//   type 0x03 CenterToVerifierZk  body: u8 h, u32be a, u32be b, u8 m_a, u8 m_b
//   type 0x04 ProverToVerifier    body: u32be n, n x u8 x_j, n x u8 z_j
//   type 0x05 Verdict             body: u8 (1 accept, 0 reject)
//
// Bits travel one per byte (0x00/0x01). Any unknown type, length mismatch,
// non-bit byte, or oversized frame is a protocol violation and aborts the
// session. In ZK mode the verifier is only ever sent type 0x03, which
// physically cannot carry more than the two revealed pad bits.

inline constexpr std::uint32_t kMaxFramePayload = 1u << 20;

struct CenterToProver {
  int h = 0;
  std::vector<int> m;
};

struct CenterToVerifierMain {
  int h = 0;
  std::vector<int> m;
};

struct CenterToVerifierZk {
  int h = 0;
  int a = 0;
  int b = 0;
  int m_a = 0;
  int m_b = 0;
};

struct ProverToVerifier {
  std::vector<int> x;
  std::vector<int> z;
};

struct VerdictMessage {
  Verdict verdict = Verdict::reject;
};

using WireMessage = std::variant<CenterToProver, CenterToVerifierMain, CenterToVerifierZk,
                                 ProverToVerifier, VerdictMessage>;

namespace wire_detail {

inline void put_u32be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

inline std::uint32_t get_u32be(std::span<const std::uint8_t> in, std::size_t at) {
  return (std::uint32_t{in[at]} << 24) | (std::uint32_t{in[at + 1]} << 16) |
         (std::uint32_t{in[at + 2]} << 8) | std::uint32_t{in[at + 3]};
}

inline void put_bits(std::vector<std::uint8_t>& out, const std::vector<int>& bits) {
  for (int b : bits) {
    if (b != 0 && b != 1) throw TransportError("wire: bit outside {0,1}");
    out.push_back(static_cast<std::uint8_t>(b));
  }
}

struct Reader {
  std::span<const std::uint8_t> data;
  std::size_t at = 0;

  std::uint8_t u8() {
    if (at + 1 > data.size()) throw TransportError("wire: truncated payload");
    return data[at++];
  }
  std::uint32_t u32be() {
    if (at + 4 > data.size()) throw TransportError("wire: truncated payload");
    std::uint32_t v = get_u32be(data, at);
    at += 4;
    return v;
  }
  int bit() {
    std::uint8_t v = u8();
    if (v > 1) throw TransportError("wire: bit byte outside {0,1}");
    return v;
  }
  std::vector<int> bits(std::uint32_t n) {
    std::vector<int> out(n);
    for (auto& b : out) b = bit();
    return out;
  }
  void done() const {
    if (at != data.size()) throw TransportError("wire: trailing bytes in payload");
  }
};

}  // namespace wire_detail

inline std::vector<std::uint8_t> encode_payload(const WireMessage& msg) {
  using namespace wire_detail;
  std::vector<std::uint8_t> out;
  if (const auto* cp = std::get_if<CenterToProver>(&msg)) {
    out.push_back(0x01);
    out.push_back(static_cast<std::uint8_t>(cp->h));
    put_u32be(out, static_cast<std::uint32_t>(cp->m.size()));
    put_bits(out, cp->m);
  } else if (const auto* cv = std::get_if<CenterToVerifierMain>(&msg)) {
    out.push_back(0x02);
    out.push_back(static_cast<std::uint8_t>(cv->h));
    put_u32be(out, static_cast<std::uint32_t>(cv->m.size()));
    put_bits(out, cv->m);
  } else if (const auto* zk = std::get_if<CenterToVerifierZk>(&msg)) {
    out.push_back(0x03);
    out.push_back(static_cast<std::uint8_t>(zk->h));
    put_u32be(out, static_cast<std::uint32_t>(zk->a));
    put_u32be(out, static_cast<std::uint32_t>(zk->b));
    out.push_back(static_cast<std::uint8_t>(zk->m_a));
    out.push_back(static_cast<std::uint8_t>(zk->m_b));
  } else if (const auto* pv = std::get_if<ProverToVerifier>(&msg)) {
    if (pv->x.size() != pv->z.size()) throw TransportError("wire: x/z length mismatch");
    out.push_back(0x04);
    put_u32be(out, static_cast<std::uint32_t>(pv->x.size()));
    put_bits(out, pv->x);
    put_bits(out, pv->z);
  } else if (const auto* vd = std::get_if<VerdictMessage>(&msg)) {
    out.push_back(0x05);
    out.push_back(vd->verdict == Verdict::accept ? 1 : 0);
  } else {
    throw TransportError("wire: unknown message");
  }
  return out;
}

inline std::vector<std::uint8_t> encode_frame(const WireMessage& msg) {
  std::vector<std::uint8_t> payload = encode_payload(msg);
  std::vector<std::uint8_t> frame;
  frame.reserve(payload.size() + 4);
  wire_detail::put_u32be(frame, static_cast<std::uint32_t>(payload.size()));
  frame.insert(frame.end(), payload.begin(), payload.end());
  return frame;
}

inline WireMessage decode_payload(std::span<const std::uint8_t> payload) {
  using namespace wire_detail;
  if (payload.empty()) throw TransportError("wire: empty payload");
  Reader r{payload, 1};
  switch (payload[0]) {
    case 0x01: {
      CenterToProver msg;
      msg.h = r.bit();
      std::uint32_t n = r.u32be();
      if (n == 0 || n > kMaxFramePayload) throw TransportError("wire: bad bit-vector length");
      msg.m = r.bits(n);
      r.done();
      return msg;
    }
    case 0x02: {
      CenterToVerifierMain msg;
      msg.h = r.bit();
      std::uint32_t n = r.u32be();
      if (n == 0 || n > kMaxFramePayload) throw TransportError("wire: bad bit-vector length");
      msg.m = r.bits(n);
      r.done();
      return msg;
    }
    case 0x03: {
      CenterToVerifierZk msg;
      msg.h = r.bit();
      msg.a = static_cast<int>(r.u32be());
      msg.b = static_cast<int>(r.u32be());
      msg.m_a = r.bit();
      msg.m_b = r.bit();
      r.done();
      if (msg.a < 1 || msg.b <= msg.a) throw TransportError("wire: zk pair not ordered");
      return msg;
    }
    case 0x04: {
      ProverToVerifier msg;
      std::uint32_t n = r.u32be();
      if (n == 0 || n > kMaxFramePayload) throw TransportError("wire: bad bit-vector length");
      msg.x = r.bits(n);
      msg.z = r.bits(n);
      r.done();
      return msg;
    }
    case 0x05: {
      VerdictMessage msg;
      msg.verdict = r.bit() ? Verdict::accept : Verdict::reject;
      r.done();
      return msg;
    }
    default:
      throw TransportError("wire: unknown message type " + std::to_string(payload[0]));
  }
}

}  // namespace qcv
