#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include "qarena/arena/room.hpp"

namespace qarena::arena {

// A room plus the lock that serializes its inputs. Whoever holds the lock
// decides the arrival order.
struct RoomSlot {
  explicit RoomSlot(Room r) : room(std::move(r)) {}
  std::mutex mu;
  Room room;
};

class RoomDirectory {
 public:
  std::shared_ptr<RoomSlot> create(const std::string& creator, bool creator_is_admin, RoomConfig config,
                                   std::vector<QuestionPtr> pool, Timestamp now);
  std::shared_ptr<RoomSlot> find(const std::string& id) const;
  std::vector<std::shared_ptr<RoomSlot>> all() const;

 private:
  mutable std::shared_mutex mu_;
  std::map<std::string, std::shared_ptr<RoomSlot>> rooms_;
  std::uint64_t next_id_ = 1;
};

}  // namespace qarena::arena
