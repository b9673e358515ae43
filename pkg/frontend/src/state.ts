/**
 * Explorer state and its pure transitions.
 *
 * State never mutates the loaded bundle; every transition returns a new
 * state value. Filters and selection always reference entities present in
 * the bundle.
 */

import type { Bundle, RelationshipEntry } from "./bundle.js";

export type EntityKind = "aspect" | "check";

export interface Entity {
  kind: EntityKind;
  nodeId: string;
  document: string;
  name: string;
}

export interface Filters {
  dsl: string | null;
  analyzer: string | null;
  threat: string | null;
  elementType: string | null;
  maxShortestTotal: number | null;
}

export interface ExplorerState {
  bundle: Bundle;
  selection: Entity | null;
  filters: Filters;
  expanded: ReadonlySet<string>;
  query: string;
}

export const NO_FILTERS: Filters = {
  dsl: null,
  analyzer: null,
  threat: null,
  elementType: null,
  maxShortestTotal: null,
};

export function createState(bundle: Bundle): ExplorerState {
  return {
    bundle,
    selection: null,
    filters: { ...NO_FILTERS },
    expanded: new Set(),
    query: "",
  };
}

/** All selectable aspects and checks, in document order. */
export function entities(bundle: Bundle): Entity[] {
  const result: Entity[] = [];
  for (const doc of bundle.documents) {
    if (doc.dsl) {
      for (const spec of doc.dsl.specifications) {
        for (const aspect of spec.aspects) {
          result.push({
            kind: "aspect",
            nodeId: aspect.nodeId,
            document: doc.name,
            name: aspect.name,
          });
        }
      }
    }
    if (doc.analyzer) {
      for (const check of doc.analyzer.checks) {
        result.push({
          kind: "check",
          nodeId: check.nodeId,
          document: doc.name,
          name: check.name,
        });
      }
    }
  }
  return result;
}

export function searchEntities(state: ExplorerState): Entity[] {
  const query = state.query.trim().toLowerCase();
  const all = entities(state.bundle);
  if (!query) return all;
  return all.filter(
    (entity) =>
      entity.name.toLowerCase().includes(query) ||
      entity.document.toLowerCase().includes(query),
  );
}

export function select(state: ExplorerState, entity: Entity): ExplorerState {
  return { ...state, selection: entity, expanded: new Set() };
}

export function setQuery(state: ExplorerState, query: string): ExplorerState {
  return { ...state, query };
}

export function setFilters(
  state: ExplorerState,
  patch: Partial<Filters>,
): ExplorerState {
  return { ...state, filters: { ...state.filters, ...patch } };
}

export function clearFilters(state: ExplorerState): ExplorerState {
  return { ...state, filters: { ...NO_FILTERS } };
}

export function relationshipKey(entry: RelationshipEntry): string {
  return (
    `${entry.aspectRef.document}::${entry.aspectRef.name}` +
    `↔${entry.checkRef.document}::${entry.checkRef.name}`
  );
}

export function toggleExpanded(
  state: ExplorerState,
  entry: RelationshipEntry,
): ExplorerState {
  const key = relationshipKey(entry);
  const expanded = new Set(state.expanded);
  if (expanded.has(key)) {
    expanded.delete(key);
  } else {
    expanded.add(key);
  }
  return { ...state, expanded };
}

export function isExpanded(
  state: ExplorerState,
  entry: RelationshipEntry,
): boolean {
  return state.expanded.has(relationshipKey(entry));
}

export interface Counterpart {
  entity: Entity;
  relationship: RelationshipEntry;
}

function matchesEntity(
  entry: RelationshipEntry,
  entity: Entity,
): "aspect" | "check" | null {
  if (
    entity.kind === "aspect" &&
    entry.aspectRef.document === entity.document &&
    entry.aspectRef.name === entity.name
  ) {
    return "aspect";
  }
  if (
    entity.kind === "check" &&
    entry.checkRef.document === entity.document &&
    entry.checkRef.name === entity.name
  ) {
    return "check";
  }
  return null;
}

function pathsMention(entry: RelationshipEntry, nodeId: string): boolean {
  for (const path of [...entry.securityPaths, ...entry.systemPaths]) {
    if (path.some((step) => step.nodeId === nodeId)) return true;
  }
  return false;
}

function passesFilters(state: ExplorerState, entry: RelationshipEntry): boolean {
  const { filters, bundle } = state;
  if (filters.dsl !== null && entry.aspectRef.document !== filters.dsl) {
    return false;
  }
  if (
    filters.analyzer !== null &&
    entry.checkRef.document !== filters.analyzer
  ) {
    return false;
  }
  if (
    filters.maxShortestTotal !== null &&
    entry.shortestTotal > filters.maxShortestTotal
  ) {
    return false;
  }
  if (filters.threat !== null) {
    const threat = bundle.threats.find((t) => t.name === filters.threat);
    if (!threat || !pathsMention(entry, threat.nodeId)) return false;
  }
  if (filters.elementType !== null) {
    const element = bundle.elementTypes.find(
      (e) => e.name === filters.elementType,
    );
    if (!element || !pathsMention(entry, element.nodeId)) return false;
  }
  return true;
}

/**
 * Related counterparts of the current selection, most direct first
 * (ascending shortestTotal, then counterpart name), after filters.
 */
export function relatedCounterparts(state: ExplorerState): Counterpart[] {
  if (state.selection === null) return [];
  const byId = new Map(
    entities(state.bundle).map((entity) => [
      `${entity.kind}:${entity.document}:${entity.name}`,
      entity,
    ]),
  );
  const result: Counterpart[] = [];
  for (const entry of state.bundle.relationships) {
    const side = matchesEntity(entry, state.selection);
    if (side === null || !passesFilters(state, entry)) continue;
    const counterpart =
      side === "aspect"
        ? byId.get(`check:${entry.checkRef.document}:${entry.checkRef.name}`)
        : byId.get(
            `aspect:${entry.aspectRef.document}:${entry.aspectRef.name}`,
          );
    if (counterpart) {
      result.push({ entity: counterpart, relationship: entry });
    }
  }
  result.sort(
    (a, b) =>
      a.relationship.shortestTotal - b.relationship.shortestTotal ||
      a.entity.name.localeCompare(b.entity.name) ||
      a.entity.document.localeCompare(b.entity.document),
  );
  return result;
}
