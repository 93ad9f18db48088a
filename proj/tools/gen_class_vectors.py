#!/usr/bin/env python3
"""Regenerates data/class_vectors_v1.csv.

Each semantic cluster owns a triple of dimensions drawn from a partial
Steiner triple system on dims 0..30, so two clusters share at most one
dimension. Members of a cluster get a distinct weight pattern over the
cluster triple. Dim 31 carries a small shared component.

Within-cluster cosine >= 0.9; cross-cluster cosine <= 0.53.

After regenerating, run tools/embed_data.py to refresh the bundled copy.
"""
import itertools
import sys

import numpy as np

CLASSES = [
    "Fridge", "Microwave", "StoveBurner", "SinkBasin", "BathtubBasin", "Faucet",
    "CounterTop", "Cabinet", "Drawer", "Safe", "Table", "Desk", "SideTable",
    "DiningTable", "CoffeeTable", "Dresser", "TVStand", "Shelf", "ShelvingUnit",
    "Sofa", "ArmChair", "Ottoman", "Bed", "Toilet", "GarbageCan", "LaundryHamper",
    "TowelHolder", "CoffeeMachine", "Toaster", "Lamp", "FloorLamp", "DeskLamp",
    "Television", "HousePlant",
    "Apple", "Tomato", "Bread", "Potato", "Lettuce", "Egg",
    "SlicedApple", "SlicedTomato", "SlicedBread", "SlicedPotato", "SlicedLettuce",
    "Mug", "Cup", "Bowl", "Plate", "Pan", "Pot", "Kettle", "Box",
    "Knife", "ButterKnife", "Fork", "Spoon", "Spatula", "Ladle",
    "Book", "Pencil", "Pen", "Laptop", "CellPhone", "RemoteControl", "KeyChain",
    "CreditCard", "Watch", "Newspaper", "Pillow", "Towel", "HandTowel", "Cloth",
    "SoapBar", "Sponge", "ToiletPaper", "Candle", "Vase", "Statue", "Bottle",
    "GlassBottle", "WineBottle", "SoapBottle", "SprayBottle", "TeddyBear",
    "AlarmClock", "CD", "TissueBox", "PepperShaker", "SaltShaker",
]

CLUSTERS = [
    ["Table", "Desk", "SideTable", "DiningTable", "CoffeeTable", "Dresser", "TVStand"],
    ["Sofa", "ArmChair", "Ottoman"],
    ["Shelf", "ShelvingUnit"],
    ["Lamp", "FloorLamp", "DeskLamp"],
    ["Bottle", "GlassBottle", "WineBottle", "SoapBottle", "SprayBottle"],
    ["Mug", "Cup"],
    ["Pan", "Pot", "Kettle"],
    ["Knife", "ButterKnife"],
    ["Towel", "HandTowel"],
    ["PepperShaker", "SaltShaker"],
    ["Apple", "SlicedApple"],
    ["Tomato", "SlicedTomato"],
    ["Bread", "SlicedBread"],
    ["Potato", "SlicedPotato"],
    ["Lettuce", "SlicedLettuce"],
]

PATTERNS = [
    (1.0, 1.0, 1.0),
    (1.3, 1.0, 0.8),
    (0.8, 1.3, 1.0),
    (1.0, 0.8, 1.3),
    (1.3, 0.8, 1.0),
    (1.0, 1.3, 0.8),
    (0.8, 1.0, 1.3),
]


def triples():
    chosen = []
    for t in itertools.combinations(range(31), 3):
        if all(len(set(t) & set(c)) <= 1 for c in chosen):
            chosen.append(t)
    return chosen


def main():
    clustered = {c for cl in CLUSTERS for c in cl}
    groups = list(CLUSTERS) + [[c] for c in CLASSES if c not in clustered]
    tri = triples()
    assert len(tri) >= len(groups), (len(tri), len(groups))
    vec = {}
    for g, members in enumerate(groups):
        for m, name in enumerate(members):
            v = np.zeros(32)
            for k, d in enumerate(tri[g]):
                v[d] = PATTERNS[m][k]
            v[31] = 0.3
            vec[name] = v / np.linalg.norm(v)
    assert set(vec) == set(CLASSES)

    out = sys.stdout
    out.write("class," + ",".join(f"v{i}" for i in range(1, 33)) + "\n")
    for name in CLASSES:
        out.write(name + "," + ",".join(f"{x:.6f}" for x in vec[name]) + "\n")


if __name__ == "__main__":
    main()
