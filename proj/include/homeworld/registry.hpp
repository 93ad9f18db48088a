#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "homeworld/core.hpp"

namespace homeworld {

struct ObjectClass {
  std::string name;
  bool pickupable = false;
  bool openable = false;
  bool toggleable = false;
  bool sliceable = false;
  bool receptacle = false;
  int base_size = 1;

  /// Non-pickupable classes are "large": always mapped.
  bool large() const { return !pickupable; }
};

/// Class registry. Lookup is by name, iteration is in insertion order.
class ClassRegistry {
 public:
  ClassRegistry() = default;
  explicit ClassRegistry(std::vector<ObjectClass> classes) {
    for (auto& c : classes) add(std::move(c));
  }

  void add(ObjectClass c) {
    if (c.name.empty()) throw Error(ErrorCode::InvalidArgument, "class name is empty");
    if (c.base_size < 1) throw Error(ErrorCode::InvalidArgument, "base_size must be >= 1", c.name);
    if (index_.count(c.name)) throw Error(ErrorCode::InvalidArgument, "duplicate class", c.name);
    index_.emplace(c.name, classes_.size());
    classes_.push_back(std::move(c));
  }

  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  const ObjectClass* find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : &classes_[it->second];
  }

  const ObjectClass& at(const std::string& name) const {
    if (auto* c = find(name)) return *c;
    throw Error(ErrorCode::UnknownClass, "unknown class '" + name + "'", name);
  }

  const std::vector<ObjectClass>& classes() const { return classes_; }
  std::size_t size() const { return classes_.size(); }
  bool empty() const { return classes_.empty(); }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    out.reserve(classes_.size());
    for (const auto& c : classes_) out.push_back(c.name);
    return out;
  }

 private:
  std::vector<ObjectClass> classes_;
  std::map<std::string, std::size_t> index_;
};

inline std::string sliced_name(const std::string& cls) { return "Sliced" + cls; }

/// "SlicedTomato" -> "Tomato"; nullopt when `cls` is not a sliced class.
inline std::optional<std::string> unsliced_name(const std::string& cls) {
  constexpr std::string_view prefix = "Sliced";
  if (cls.size() > prefix.size() && cls.compare(0, prefix.size(), prefix) == 0)
    return cls.substr(prefix.size());
  return std::nullopt;
}

inline bool is_knife(const std::string& cls) { return cls == "Knife" || cls == "ButterKnife"; }
inline bool is_lamp(const std::string& cls) { return cls == "FloorLamp" || cls == "DeskLamp" || cls == "Lamp"; }

namespace detail {
inline ObjectClass large(std::string n, int size, bool rec, bool open = false, bool toggle = false) {
  return {std::move(n), false, open, toggle, false, rec, size};
}
inline ObjectClass small(std::string n, int size, bool rec = false, bool slice = false) {
  return {std::move(n), true, false, false, slice, rec, size};
}
}  // namespace detail

/// The bundled household registry (90 classes).
inline const ClassRegistry& default_registry() {
  using detail::large;
  using detail::small;
  static const ClassRegistry registry{{
      large("Fridge", 6, true, true),
      large("Microwave", 4, true, true, true),
      large("StoveBurner", 4, true, false, true),
      large("SinkBasin", 4, true),
      large("BathtubBasin", 5, true),
      large("Faucet", 2, false, false, true),
      large("CounterTop", 6, true),
      large("Cabinet", 4, true, true),
      large("Drawer", 3, true, true),
      large("Safe", 3, true, true),
      large("Table", 4, true),
      large("Desk", 4, true),
      large("SideTable", 4, true),
      large("DiningTable", 5, true),
      large("CoffeeTable", 4, true),
      large("Dresser", 4, true),
      large("TVStand", 4, true),
      large("Shelf", 4, true),
      large("ShelvingUnit", 5, true),
      large("Sofa", 6, true),
      large("ArmChair", 4, true),
      large("Ottoman", 3, true),
      large("Bed", 6, true),
      large("Toilet", 4, true),
      large("GarbageCan", 3, true),
      large("LaundryHamper", 3, true),
      large("TowelHolder", 2, true),
      large("CoffeeMachine", 3, true, false, true),
      large("Toaster", 2, true, false, true),
      large("Lamp", 3, false, false, true),
      large("FloorLamp", 3, false, false, true),
      large("DeskLamp", 2, false, false, true),
      large("Television", 4, false, false, true),
      large("HousePlant", 2, false),
      small("Apple", 2, false, true),
      small("Tomato", 2, false, true),
      small("Bread", 2, false, true),
      small("Potato", 2, false, true),
      small("Lettuce", 2, false, true),
      small("Egg", 2),
      small("SlicedApple", 1),
      small("SlicedTomato", 1),
      small("SlicedBread", 1),
      small("SlicedPotato", 1),
      small("SlicedLettuce", 1),
      small("Mug", 2, true),
      small("Cup", 2, true),
      small("Bowl", 2, true),
      small("Plate", 2, true),
      small("Pan", 3, true),
      small("Pot", 3, true),
      small("Kettle", 3, true),
      small("Box", 3, true),
      small("Knife", 1),
      small("ButterKnife", 1),
      small("Fork", 1),
      small("Spoon", 1),
      small("Spatula", 1),
      small("Ladle", 1),
      small("Book", 2),
      small("Pencil", 1),
      small("Pen", 1),
      small("Laptop", 3),
      small("CellPhone", 1),
      small("RemoteControl", 1),
      small("KeyChain", 1),
      small("CreditCard", 1),
      small("Watch", 1),
      small("Newspaper", 2),
      small("Pillow", 2),
      small("Towel", 2),
      small("HandTowel", 2),
      small("Cloth", 1),
      small("SoapBar", 1),
      small("Sponge", 1),
      small("ToiletPaper", 1),
      small("Candle", 1),
      small("Vase", 2),
      small("Statue", 2),
      small("Bottle", 2),
      small("GlassBottle", 2),
      small("WineBottle", 2),
      small("SoapBottle", 2),
      small("SprayBottle", 2),
      small("TeddyBear", 2),
      small("AlarmClock", 2),
      small("CD", 1),
      small("TissueBox", 2),
      small("PepperShaker", 1),
      small("SaltShaker", 1),
  }};
  return registry;
}

}  // namespace homeworld
