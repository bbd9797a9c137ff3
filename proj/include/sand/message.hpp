#pragma once

#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "sand/geometry.hpp"

namespace sand {

enum class MessageKind { Announce, Confirm, Conflict };

inline const char* to_string(MessageKind k) {
  switch (k) {
    case MessageKind::Announce: return "announce";
    case MessageKind::Confirm: return "confirm";
    case MessageKind::Conflict: return "conflict";
  }
  return "?";
}

/// An immutable radio message. Confirms and conflicts carry the message
/// they refer to. Two messages are identical iff their keys are equal: the
/// key encodes kind, claimed sender, payload digest and, recursively, the
/// attached original.
class Message {
 public:
  static Message announce(const Point& sender, std::uint64_t digest = 0) {
    return Message(MessageKind::Announce, sender, digest, nullptr);
  }

  static Message confirm(const Point& sender, const Message& announce, std::uint64_t digest = 0) {
    if (announce.kind() != MessageKind::Announce) {
      throw InvalidArgument("a confirm can only refer to an announce");
    }
    return Message(MessageKind::Confirm, sender, digest, std::make_shared<const Message>(announce));
  }

  static Message conflict(const Point& sender, const Message& original, std::uint64_t digest = 0) {
    return Message(MessageKind::Conflict, sender, digest, std::make_shared<const Message>(original));
  }

  MessageKind kind() const { return kind_; }
  const Point& claimed_sender() const { return sender_; }
  std::uint64_t digest() const { return digest_; }
  const Message* original() const { return original_.get(); }
  const std::string& key() const { return key_; }

  /// Claimed senders along the attachment chain, outermost first.
  std::vector<Point> identities() const {
    std::vector<Point> out;
    for (const Message* m = this; m; m = m->original()) out.push_back(m->claimed_sender());
    return out;
  }

  friend bool operator==(const Message& a, const Message& b) { return a.key_ == b.key_; }
  friend bool operator<(const Message& a, const Message& b) { return a.key_ < b.key_; }

 private:
  Message(MessageKind kind, const Point& sender, std::uint64_t digest,
          std::shared_ptr<const Message> original)
      : kind_(kind), sender_(sender), digest_(digest), original_(std::move(original)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%c[%a,%a]#%llx", "AKX"[static_cast<int>(kind_)], sender_.x,
                  sender_.y, static_cast<unsigned long long>(digest_));
    key_ = buf;
    if (original_) key_ += "(" + original_->key_ + ")";
  }

  MessageKind kind_;
  Point sender_;
  std::uint64_t digest_;
  std::shared_ptr<const Message> original_;
  std::string key_;
};

struct ReceivedRecord {
  Message message;
  double measured_rss = 0.0;
  std::size_t arrival_index = 0;
};

enum class ConflictKind { Explicit, Implicit };

inline const char* to_string(ConflictKind k) {
  return k == ConflictKind::Explicit ? "explicit" : "implicit";
}

struct ConflictRecord {
  Message subject;
  ConflictKind kind = ConflictKind::Explicit;
  Point observer;
};

}  // namespace sand
