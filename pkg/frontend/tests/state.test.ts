import { readFileSync } from "node:fs";
import { beforeEach, describe, expect, it } from "vitest";

import { Bundle, parseBundle } from "../src/bundle.js";
import {
  Entity,
  ExplorerState,
  clearFilters,
  createState,
  entities,
  isExpanded,
  relatedCounterparts,
  searchEntities,
  select,
  setFilters,
  setQuery,
  toggleExpanded,
} from "../src/state.js";

const FIXTURE = new URL("./fixtures/mini.seclan-bundle.json", import.meta.url);

let bundle: Bundle;
let state: ExplorerState;

function entity(kind: "aspect" | "check", name: string): Entity {
  const match = entities(bundle).find(
    (candidate) => candidate.kind === kind && candidate.name === name,
  );
  if (!match) throw new Error(`no such entity ${kind} ${name}`);
  return match;
}

beforeEach(() => {
  bundle = parseBundle(JSON.parse(readFileSync(FIXTURE, "utf-8")));
  state = createState(bundle);
});

describe("createState", () => {
  it("starts with no selection and no filters", () => {
    expect(state.selection).toBeNull();
    expect(state.filters).toEqual({
      dsl: null,
      analyzer: null,
      threat: null,
      elementType: null,
      maxShortestTotal: null,
    });
    expect(relatedCounterparts(state)).toEqual([]);
  });

  it("lists every aspect and check", () => {
    const all = entities(bundle);
    expect(all).toHaveLength(4); // 2 aspects + 2 checks
    expect(all.filter((e) => e.kind === "aspect")).toHaveLength(2);
    expect(all.filter((e) => e.kind === "check")).toHaveLength(2);
  });
});

describe("select", () => {
  it("lists counterparts sorted by shortest total then name", () => {
    const flowCheck = entity("check", "Information Flow Analysis");
    const selected = select(state, flowCheck);
    const counterparts = relatedCounterparts(selected);
    expect(counterparts).toHaveLength(2);
    expect(counterparts[0].relationship.shortestTotal).toBe(6);
    expect(
      counterparts.map((c) => c.entity.name),
    ).toEqual(["Secure Data Processing", "Secure Dependency"]);
    const totals = counterparts.map((c) => c.relationship.shortestTotal);
    expect(totals).toEqual([...totals].sort((a, b) => a - b));
  });

  it("reports no counterparts for an unrelated check", () => {
    const crypto = entity("check", "Crypto Usage Analysis");
    expect(relatedCounterparts(select(state, crypto))).toEqual([]);
  });

  it("never mutates the bundle", () => {
    const before = JSON.stringify(bundle);
    const flowCheck = entity("check", "Information Flow Analysis");
    let next = select(state, flowCheck);
    next = setFilters(next, { threat: "Information Disclosure" });
    relatedCounterparts(next);
    next = toggleExpanded(next, next.bundle.relationships[0]);
    expect(JSON.stringify(bundle)).toBe(before);
  });
});

describe("filters", () => {
  it("maxShortestTotal hides less direct pairs", () => {
    const flowCheck = entity("check", "Information Flow Analysis");
    const selected = select(state, flowCheck);
    const all = relatedCounterparts(selected);
    expect(all).toHaveLength(2);
    const capped = setFilters(selected, { maxShortestTotal: 6 });
    // both mini-corpus pairs sit at the minimum total of 6
    expect(relatedCounterparts(capped)).toHaveLength(2);
    const tighter = setFilters(selected, { maxShortestTotal: 5 });
    expect(relatedCounterparts(tighter)).toHaveLength(0);
  });

  it("dsl filter keeps only matching documents", () => {
    const flowCheck = entity("check", "Information Flow Analysis");
    const selected = select(state, flowCheck);
    const filtered = setFilters(selected, { dsl: "SecDFD" });
    const names = relatedCounterparts(filtered).map((c) => c.entity.name);
    expect(names).toEqual(["Secure Data Processing"]);
  });

  it("threat filter matches path contents", () => {
    const aspect = entity("aspect", "Secure Dependency");
    const selected = select(state, aspect);
    const disclosure = setFilters(selected, {
      threat: "Information Disclosure",
    });
    expect(relatedCounterparts(disclosure)).toHaveLength(1);
    const spoofing = setFilters(selected, { threat: "Spoofing" });
    expect(relatedCounterparts(spoofing)).toHaveLength(0);
  });

  it("clearing filters restores the unfiltered listing exactly", () => {
    const flowCheck = entity("check", "Information Flow Analysis");
    const selected = select(state, flowCheck);
    const unfiltered = relatedCounterparts(selected);
    const filtered = setFilters(selected, {
      dsl: "SecDFD",
      maxShortestTotal: 6,
      elementType: "InformationFlow",
    });
    expect(relatedCounterparts(filtered).length).toBeLessThan(
      unfiltered.length,
    );
    const restored = clearFilters(filtered);
    expect(relatedCounterparts(restored)).toEqual(unfiltered);
  });
});

describe("expand", () => {
  it("toggles per relationship and collapses back", () => {
    const flowCheck = entity("check", "Information Flow Analysis");
    let current = select(state, flowCheck);
    const [first] = relatedCounterparts(current);
    expect(isExpanded(current, first.relationship)).toBe(false);
    current = toggleExpanded(current, first.relationship);
    expect(isExpanded(current, first.relationship)).toBe(true);
    current = toggleExpanded(current, first.relationship);
    expect(isExpanded(current, first.relationship)).toBe(false);
  });
});

describe("search", () => {
  it("narrows the entity list by name or document", () => {
    expect(searchEntities(setQuery(state, "crypto"))).toHaveLength(1);
    expect(searchEntities(setQuery(state, "secdfd"))).toHaveLength(1);
    expect(searchEntities(setQuery(state, ""))).toHaveLength(4);
  });
});
