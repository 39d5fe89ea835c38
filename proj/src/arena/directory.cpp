#include "qarena/arena/directory.hpp"

namespace qarena::arena {

std::shared_ptr<RoomSlot> RoomDirectory::create(const std::string& creator, bool creator_is_admin,
                                                RoomConfig config, std::vector<QuestionPtr> pool,
                                                Timestamp now) {
  validate(config);
  std::unique_lock lock(mu_);
  std::string id = "room-" + std::to_string(next_id_++);
  auto slot = std::make_shared<RoomSlot>(Room(id, creator, creator_is_admin, std::move(config), std::move(pool), now));
  rooms_.emplace(std::move(id), slot);
  return slot;
}

std::shared_ptr<RoomSlot> RoomDirectory::find(const std::string& id) const {
  std::shared_lock lock(mu_);
  const auto it = rooms_.find(id);
  return it == rooms_.end() ? nullptr : it->second;
}

std::vector<std::shared_ptr<RoomSlot>> RoomDirectory::all() const {
  std::shared_lock lock(mu_);
  std::vector<std::shared_ptr<RoomSlot>> out;
  for (const auto& [id, slot] : rooms_) out.push_back(slot);
  return out;
}

}  // namespace qarena::arena
