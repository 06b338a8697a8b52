// SPDX-License-Identifier: Apache-2.0
//
// MQTT 3.1.1 subset: CONNECT/CONNACK, PUBLISH (QoS 0 only), SUBSCRIBE/SUBACK,
// PINGREQ/PINGRESP, DISCONNECT. Remaining length uses the standard 7-bit
// varint encoding. Anything else is a protocol error and the connection is
// closed by the caller.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace warden::mqtt {

class ProtocolError : public std::runtime_error {
 public:
  explicit ProtocolError(const std::string& msg) : std::runtime_error("mqtt: " + msg) {}
};

enum class PacketType : std::uint8_t {
  Connect = 1,
  Connack = 2,
  Publish = 3,
  Subscribe = 8,
  Suback = 9,
  Pingreq = 12,
  Pingresp = 13,
  Disconnect = 14,
};

using Bytes = std::vector<std::uint8_t>;

struct Packet {
  std::uint8_t first = 0;  // packet type in the high nibble, flags in the low
  Bytes body;

  PacketType type() const { return static_cast<PacketType>(first >> 4); }
  std::uint8_t flags() const { return first & 0x0F; }
};

// ---- primitive encoders ----------------------------------------------------

inline void put_u16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

inline void put_string(Bytes& out, const std::string& s) {
  if (s.size() > 0xFFFF) throw ProtocolError("string too long");
  put_u16(out, static_cast<std::uint16_t>(s.size()));
  out.insert(out.end(), s.begin(), s.end());
}

inline void put_remaining_length(Bytes& out, std::size_t n) {
  if (n > 268435455) throw ProtocolError("remaining length too large");
  do {
    std::uint8_t digit = n % 128;
    n /= 128;
    if (n > 0) digit |= 0x80;
    out.push_back(digit);
  } while (n > 0);
}

inline Bytes frame(PacketType type, std::uint8_t flags, const Bytes& body) {
  Bytes out;
  out.push_back(static_cast<std::uint8_t>((static_cast<std::uint8_t>(type) << 4) | flags));
  put_remaining_length(out, body.size());
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

// ---- packet builders --------------------------------------------------------

inline Bytes encode_connect(const std::string& client_id, std::uint16_t keepalive = 60) {
  Bytes body;
  put_string(body, "MQTT");
  body.push_back(4);     // protocol level 3.1.1
  body.push_back(0x02);  // clean session, no will, no auth
  put_u16(body, keepalive);
  put_string(body, client_id);
  return frame(PacketType::Connect, 0, body);
}

inline Bytes encode_connack(std::uint8_t return_code = 0) {
  return frame(PacketType::Connack, 0, Bytes{0x00, return_code});
}

inline Bytes encode_publish(const std::string& topic, const std::string& payload) {
  Bytes body;
  put_string(body, topic);
  body.insert(body.end(), payload.begin(), payload.end());
  return frame(PacketType::Publish, 0, body);  // QoS 0, no dup, no retain
}

inline Bytes encode_subscribe(std::uint16_t packet_id, const std::vector<std::string>& filters) {
  Bytes body;
  put_u16(body, packet_id);
  for (const auto& f : filters) {
    put_string(body, f);
    body.push_back(0);  // requested QoS 0
  }
  return frame(PacketType::Subscribe, 0x02, body);
}

inline Bytes encode_suback(std::uint16_t packet_id, std::size_t count) {
  Bytes body;
  put_u16(body, packet_id);
  for (std::size_t i = 0; i < count; ++i) body.push_back(0x00);  // granted QoS 0
  return frame(PacketType::Suback, 0, body);
}

inline Bytes encode_pingreq() { return frame(PacketType::Pingreq, 0, {}); }
inline Bytes encode_pingresp() { return frame(PacketType::Pingresp, 0, {}); }
inline Bytes encode_disconnect() { return frame(PacketType::Disconnect, 0, {}); }

// ---- packet parsers ----------------------------------------------------------

namespace detail {

struct Cursor {
  const Bytes& b;
  std::size_t at = 0;

  std::uint8_t u8() {
    if (at >= b.size()) throw ProtocolError("truncated packet");
    return b[at++];
  }
  std::uint16_t u16() {
    const std::uint16_t hi = u8();
    return static_cast<std::uint16_t>((hi << 8) | u8());
  }
  std::string str() {
    const std::uint16_t n = u16();
    if (at + n > b.size()) throw ProtocolError("truncated string");
    std::string s(b.begin() + static_cast<long>(at), b.begin() + static_cast<long>(at + n));
    at += n;
    return s;
  }
  std::string rest() {
    std::string s(b.begin() + static_cast<long>(at), b.end());
    at = b.size();
    return s;
  }
  bool done() const { return at >= b.size(); }
};

}  // namespace detail

struct ConnectInfo {
  std::string client_id;
  std::uint16_t keepalive = 0;
};

inline ConnectInfo parse_connect(const Packet& p) {
  if (p.type() != PacketType::Connect) throw ProtocolError("not a CONNECT");
  detail::Cursor c{p.body};
  if (c.str() != "MQTT") throw ProtocolError("unknown protocol name");
  if (c.u8() != 4) throw ProtocolError("unsupported protocol level");
  const std::uint8_t flags = c.u8();
  // Only a plain clean session is supported: no will, no username/password.
  if (flags & ~0x02u) throw ProtocolError("unsupported connect flags");
  ConnectInfo info;
  info.keepalive = c.u16();
  info.client_id = c.str();
  return info;
}

struct PublishInfo {
  std::string topic;
  std::string payload;
};

inline PublishInfo parse_publish(const Packet& p) {
  if (p.type() != PacketType::Publish) throw ProtocolError("not a PUBLISH");
  if (p.flags() & 0x06) throw ProtocolError("only QoS 0 is supported");
  detail::Cursor c{p.body};
  PublishInfo info;
  info.topic = c.str();
  if (info.topic.empty()) throw ProtocolError("empty topic");
  info.payload = c.rest();
  return info;
}

struct SubscribeInfo {
  std::uint16_t packet_id = 0;
  std::vector<std::string> filters;
};

inline SubscribeInfo parse_subscribe(const Packet& p) {
  if (p.type() != PacketType::Subscribe) throw ProtocolError("not a SUBSCRIBE");
  if (p.flags() != 0x02) throw ProtocolError("bad SUBSCRIBE flags");
  detail::Cursor c{p.body};
  SubscribeInfo info;
  info.packet_id = c.u16();
  while (!c.done()) {
    std::string f = c.str();
    if (f.empty()) throw ProtocolError("empty topic filter");
    c.u8();  // requested QoS, ignored (everything is QoS 0)
    info.filters.push_back(std::move(f));
  }
  if (info.filters.empty()) throw ProtocolError("SUBSCRIBE without filters");
  return info;
}

// ---- incremental frame decoding ----------------------------------------------

/// Feed raw bytes in as they arrive; complete packets come out. Enforces a
/// cap on the remaining length so a bad peer cannot make us buffer forever.
class FrameReader {
 public:
  explicit FrameReader(std::size_t max_body = 1 << 20) : max_body_(max_body) {}

  void feed(const std::uint8_t* data, std::size_t n) {
    buf_.insert(buf_.end(), data, data + n);
  }

  /// Extract the next complete packet, if any.
  std::optional<Packet> next() {
    if (buf_.size() < 2) return std::nullopt;
    std::size_t len = 0;
    std::size_t shift = 0;
    std::size_t at = 1;
    while (true) {
      if (at >= buf_.size()) return std::nullopt;  // length itself incomplete
      const std::uint8_t digit = buf_[at++];
      len |= static_cast<std::size_t>(digit & 0x7F) << shift;
      if (!(digit & 0x80)) break;
      shift += 7;
      if (shift > 21) throw ProtocolError("malformed remaining length");
    }
    if (len > max_body_) throw ProtocolError("packet too large");
    if (buf_.size() < at + len) return std::nullopt;
    Packet p;
    p.first = buf_[0];
    p.body.assign(buf_.begin() + static_cast<long>(at),
                  buf_.begin() + static_cast<long>(at + len));
    buf_.erase(buf_.begin(), buf_.begin() + static_cast<long>(at + len));
    const auto t = static_cast<std::uint8_t>(p.type());
    if (t == 0 || t == 15) throw ProtocolError("reserved packet type");
    return p;
  }

 private:
  Bytes buf_;
  std::size_t max_body_;
};

// ---- topics -------------------------------------------------------------------

/// MQTT filter matching: '+' matches exactly one level, '#' (final level
/// only) matches the rest.
inline bool topic_matches(const std::string& filter, const std::string& topic) {
  std::size_t fi = 0, ti = 0;
  while (fi < filter.size()) {
    const std::size_t fe = filter.find('/', fi);
    const std::string flevel =
        filter.substr(fi, fe == std::string::npos ? std::string::npos : fe - fi);
    if (flevel == "#") return fe == std::string::npos;
    if (ti > topic.size()) return false;
    const std::size_t te = topic.find('/', ti);
    const std::string tlevel =
        topic.substr(ti, te == std::string::npos ? std::string::npos : te - ti);
    if (flevel != "+" && flevel != tlevel) return false;
    const bool f_last = fe == std::string::npos;
    const bool t_last = te == std::string::npos;
    if (f_last || t_last) return f_last && t_last;
    fi = fe + 1;
    ti = te + 1;
  }
  return topic.empty();
}

/// dev/<device>/<capability>/state
inline std::optional<std::pair<std::string, std::string>> parse_state_topic(
    const std::string& topic) {
  if (topic.rfind("dev/", 0) != 0) return std::nullopt;
  const std::size_t a = topic.find('/', 4);
  if (a == std::string::npos) return std::nullopt;
  const std::size_t b = topic.find('/', a + 1);
  if (b == std::string::npos || topic.substr(b + 1) != "state") return std::nullopt;
  std::string device = topic.substr(4, a - 4);
  std::string capability = topic.substr(a + 1, b - a - 1);
  if (device.empty() || capability.empty()) return std::nullopt;
  return std::make_pair(std::move(device), std::move(capability));
}

/// svc/<device>/cmd/<command>
inline std::optional<std::pair<std::string, std::string>> parse_command_topic(
    const std::string& topic) {
  if (topic.rfind("svc/", 0) != 0) return std::nullopt;
  const std::size_t a = topic.find('/', 4);
  if (a == std::string::npos) return std::nullopt;
  if (topic.compare(a, 5, "/cmd/") != 0) return std::nullopt;
  std::string device = topic.substr(4, a - 4);
  std::string command = topic.substr(a + 5);
  if (device.empty() || command.empty() || command.find('/') != std::string::npos)
    return std::nullopt;
  return std::make_pair(std::move(device), std::move(command));
}

inline std::string state_topic(const std::string& device, const std::string& capability) {
  return "dev/" + device + "/" + capability + "/state";
}

inline std::string command_topic(const std::string& device, const std::string& command) {
  return "svc/" + device + "/cmd/" + command;
}

/// Broker decisions are published here for observers (lock-step replay).
inline const char* decision_topic() { return "sys/decision"; }

}  // namespace warden::mqtt
