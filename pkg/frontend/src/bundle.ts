/**
 * Relationship bundle schema (version "1") and its loader.
 *
 * The explorer never computes relationships or paths itself: everything it
 * shows is read from a bundle exported by the seclan CLI. Loading
 * validates the schema strictly and builds the lookup indexes the rest of
 * the app works from.
 */

export class ParseFailure extends Error {}

export class SchemaMismatch extends Error {}

export type Direction = "forward" | "reverse";

export interface PathStep {
  nodeId: string;
  edgeKind: string | null;
  direction: Direction | null;
}

export interface NamedNode {
  nodeId: string;
  name: string;
}

export interface WeaknessEntry extends NamedNode {
  id: string;
  description: string;
  abstraction: string | null;
  parents: string[];
  scopes: string[];
}

export interface ElementEntry extends NamedNode {
  description: string;
  appliesTo: string[];
}

export interface AspectEntry extends NamedNode {
  description: string;
  specifiedBy: string[];
  counteracts: string[];
  categories: string[];
}

export interface CheckEntry extends NamedNode {
  description: string;
  analyzes: string[];
  detects: string[];
  categories: string[];
}

export interface SpecificationEntry {
  name: string;
  description: string;
  elements: ElementEntry[];
  aspects: AspectEntry[];
}

export interface DocumentEntry {
  name: string;
  description: string;
  categories: string[];
  references: string[];
  dsl: { nodeId: string; specifications: SpecificationEntry[] } | null;
  analyzer: { nodeId: string; checks: CheckEntry[] } | null;
}

export interface AspectRef {
  document: string;
  specification: string | null;
  name: string;
}

export interface CheckRef {
  document: string;
  name: string;
}

export interface RelationshipEntry {
  aspectRef: AspectRef;
  checkRef: CheckRef;
  securityPaths: PathStep[][];
  systemPaths: PathStep[][];
  shortestSecurity: number;
  shortestSystem: number;
  shortestTotal: number;
}

export interface Bundle {
  schemaVersion: string;
  objectives: NamedNode[];
  threats: (NamedNode & { threatens: string[] })[];
  elementTypes: NamedNode[];
  weaknesses: WeaknessEntry[];
  documents: DocumentEntry[];
  relationships: RelationshipEntry[];
  stats: Record<string, unknown>;
}

function fail(message: string): never {
  throw new ParseFailure(message);
}

function isRecord(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

function str(value: unknown, where: string): string {
  if (typeof value !== "string") fail(`${where}: expected a string`);
  return value;
}

function strArray(value: unknown, where: string): string[] {
  if (!Array.isArray(value) || value.some((v) => typeof v !== "string")) {
    fail(`${where}: expected an array of strings`);
  }
  return value as string[];
}

function record(value: unknown, where: string): Record<string, unknown> {
  if (!isRecord(value)) fail(`${where}: expected an object`);
  return value;
}

function arrayOf(value: unknown, where: string): unknown[] {
  if (!Array.isArray(value)) fail(`${where}: expected an array`);
  return value;
}

function parseStep(value: unknown, where: string): PathStep {
  const entry = record(value, where);
  const direction = entry.direction;
  if (direction !== null && direction !== "forward" && direction !== "reverse") {
    fail(`${where}: bad direction`);
  }
  const edgeKind = entry.edgeKind;
  if (edgeKind !== null && typeof edgeKind !== "string") {
    fail(`${where}: bad edgeKind`);
  }
  return {
    nodeId: str(entry.nodeId, `${where}.nodeId`),
    edgeKind: edgeKind as string | null,
    direction: direction as Direction | null,
  };
}

function parsePath(value: unknown, where: string): PathStep[] {
  const steps = arrayOf(value, where).map((v, i) =>
    parseStep(v, `${where}[${i}]`),
  );
  if (steps.length < 2) fail(`${where}: a path needs at least two nodes`);
  return steps;
}

/** Parse and validate a decoded bundle JSON value. */
export function parseBundle(raw: unknown): Bundle {
  const top = record(raw, "bundle");
  const version = top.schemaVersion;
  if (typeof version !== "string" || version !== "1") {
    throw new SchemaMismatch(
      `unsupported bundle schema version ${JSON.stringify(version ?? null)}; ` +
        'this explorer reads version "1"',
    );
  }

  const named = (value: unknown, where: string): NamedNode => {
    const entry = record(value, where);
    return {
      nodeId: str(entry.nodeId, `${where}.nodeId`),
      name: str(entry.name, `${where}.name`),
    };
  };

  const bundle: Bundle = {
    schemaVersion: version,
    objectives: arrayOf(top.objectives, "objectives").map((v, i) =>
      named(v, `objectives[${i}]`),
    ),
    threats: arrayOf(top.threats, "threats").map((v, i) => ({
      ...named(v, `threats[${i}]`),
      threatens: strArray(record(v, "threat").threatens ?? [], "threatens"),
    })),
    elementTypes: arrayOf(top.elementTypes, "elementTypes").map((v, i) =>
      named(v, `elementTypes[${i}]`),
    ),
    weaknesses: arrayOf(top.weaknesses, "weaknesses").map((v, i) => {
      const where = `weaknesses[${i}]`;
      const entry = record(v, where);
      return {
        ...named(v, where),
        id: str(entry.id, `${where}.id`),
        description: str(entry.description ?? "", `${where}.description`),
        abstraction:
          entry.abstraction == null ? null : str(entry.abstraction, where),
        parents: strArray(entry.parents ?? [], `${where}.parents`),
        scopes: strArray(entry.scopes ?? [], `${where}.scopes`),
      };
    }),
    documents: arrayOf(top.documents, "documents").map((v, i) =>
      parseDocument(v, `documents[${i}]`),
    ),
    relationships: arrayOf(top.relationships, "relationships").map((v, i) =>
      parseRelationship(v, `relationships[${i}]`),
    ),
    stats: record(top.stats ?? {}, "stats"),
  };

  const known = knownNodeIds(bundle);
  for (const rel of bundle.relationships) {
    for (const path of [...rel.securityPaths, ...rel.systemPaths]) {
      for (const step of path) {
        if (!known.has(step.nodeId)) {
          fail(`path references unknown node ${step.nodeId}`);
        }
      }
    }
  }
  return bundle;
}

function parseDocument(value: unknown, where: string): DocumentEntry {
  const entry = record(value, where);
  let dsl: DocumentEntry["dsl"] = null;
  if (entry.dsl != null) {
    const dslEntry = record(entry.dsl, `${where}.dsl`);
    dsl = {
      nodeId: str(dslEntry.nodeId, `${where}.dsl.nodeId`),
      specifications: arrayOf(
        dslEntry.specifications,
        `${where}.dsl.specifications`,
      ).map((v, i) => {
        const specWhere = `${where}.dsl.specifications[${i}]`;
        const spec = record(v, specWhere);
        return {
          name: str(spec.name, `${specWhere}.name`),
          description: str(spec.description ?? "", specWhere),
          elements: arrayOf(spec.elements, `${specWhere}.elements`).map(
            (e, j) => {
              const elWhere = `${specWhere}.elements[${j}]`;
              const el = record(e, elWhere);
              return {
                nodeId: str(el.nodeId, elWhere),
                name: str(el.name, elWhere),
                description: str(el.description ?? "", elWhere),
                appliesTo: strArray(el.appliesTo ?? [], elWhere),
              };
            },
          ),
          aspects: arrayOf(spec.aspects, `${specWhere}.aspects`).map((a, j) => {
            const asWhere = `${specWhere}.aspects[${j}]`;
            const aspect = record(a, asWhere);
            return {
              nodeId: str(aspect.nodeId, asWhere),
              name: str(aspect.name, asWhere),
              description: str(aspect.description ?? "", asWhere),
              specifiedBy: strArray(aspect.specifiedBy ?? [], asWhere),
              counteracts: strArray(aspect.counteracts ?? [], asWhere),
              categories: strArray(aspect.categories ?? [], asWhere),
            };
          }),
        };
      }),
    };
  }
  let analyzer: DocumentEntry["analyzer"] = null;
  if (entry.analyzer != null) {
    const anEntry = record(entry.analyzer, `${where}.analyzer`);
    analyzer = {
      nodeId: str(anEntry.nodeId, `${where}.analyzer.nodeId`),
      checks: arrayOf(anEntry.checks, `${where}.analyzer.checks`).map(
        (c, i) => {
          const cWhere = `${where}.analyzer.checks[${i}]`;
          const check = record(c, cWhere);
          return {
            nodeId: str(check.nodeId, cWhere),
            name: str(check.name, cWhere),
            description: str(check.description ?? "", cWhere),
            analyzes: strArray(check.analyzes ?? [], cWhere),
            detects: strArray(check.detects ?? [], cWhere),
            categories: strArray(check.categories ?? [], cWhere),
          };
        },
      ),
    };
  }
  return {
    name: str(entry.name, `${where}.name`),
    description: str(entry.description ?? "", where),
    categories: strArray(entry.categories ?? [], where),
    references: strArray(entry.references ?? [], where),
    dsl,
    analyzer,
  };
}

function parseRelationship(value: unknown, where: string): RelationshipEntry {
  const entry = record(value, where);
  const aspectRef = record(entry.aspectRef, `${where}.aspectRef`);
  const checkRef = record(entry.checkRef, `${where}.checkRef`);
  const num = (v: unknown, w: string): number => {
    if (typeof v !== "number") fail(`${w}: expected a number`);
    return v;
  };
  return {
    aspectRef: {
      document: str(aspectRef.document, `${where}.aspectRef.document`),
      specification:
        aspectRef.specification == null
          ? null
          : str(aspectRef.specification, where),
      name: str(aspectRef.name, `${where}.aspectRef.name`),
    },
    checkRef: {
      document: str(checkRef.document, `${where}.checkRef.document`),
      name: str(checkRef.name, `${where}.checkRef.name`),
    },
    securityPaths: arrayOf(entry.securityPaths, `${where}.securityPaths`).map(
      (v, i) => parsePath(v, `${where}.securityPaths[${i}]`),
    ),
    systemPaths: arrayOf(entry.systemPaths, `${where}.systemPaths`).map(
      (v, i) => parsePath(v, `${where}.systemPaths[${i}]`),
    ),
    shortestSecurity: num(entry.shortestSecurity, `${where}.shortestSecurity`),
    shortestSystem: num(entry.shortestSystem, `${where}.shortestSystem`),
    shortestTotal: num(entry.shortestTotal, `${where}.shortestTotal`),
  };
}

/** Every node id defined anywhere in the bundle. */
export function knownNodeIds(bundle: Bundle): Set<string> {
  const ids = new Set<string>();
  for (const group of [bundle.objectives, bundle.threats, bundle.elementTypes]) {
    for (const node of group) ids.add(node.nodeId);
  }
  for (const weakness of bundle.weaknesses) ids.add(weakness.nodeId);
  for (const doc of bundle.documents) {
    if (doc.dsl) {
      ids.add(doc.dsl.nodeId);
      for (const spec of doc.dsl.specifications) {
        for (const element of spec.elements) ids.add(element.nodeId);
        for (const aspect of spec.aspects) ids.add(aspect.nodeId);
      }
    }
    if (doc.analyzer) {
      ids.add(doc.analyzer.nodeId);
      for (const check of doc.analyzer.checks) ids.add(check.nodeId);
    }
  }
  return ids;
}

/**
 * Display label per node id. Weakness nodes show their CWE id; everything
 * else shows its name — matching the chain rendering of the exporter.
 */
export function labelIndex(bundle: Bundle): Map<string, string> {
  const labels = new Map<string, string>();
  for (const group of [bundle.objectives, bundle.threats, bundle.elementTypes]) {
    for (const node of group) labels.set(node.nodeId, node.name);
  }
  for (const weakness of bundle.weaknesses) {
    labels.set(weakness.nodeId, weakness.id);
  }
  for (const doc of bundle.documents) {
    if (doc.dsl) {
      labels.set(doc.dsl.nodeId, doc.name);
      for (const spec of doc.dsl.specifications) {
        for (const element of spec.elements) {
          labels.set(element.nodeId, element.name);
        }
        for (const aspect of spec.aspects) {
          labels.set(aspect.nodeId, aspect.name);
        }
      }
    }
    if (doc.analyzer) {
      labels.set(doc.analyzer.nodeId, doc.name);
      for (const check of doc.analyzer.checks) {
        labels.set(check.nodeId, check.name);
      }
    }
  }
  return labels;
}

/** Weakness entries by node id, for detail panels. */
export function weaknessIndex(bundle: Bundle): Map<string, WeaknessEntry> {
  return new Map(bundle.weaknesses.map((w) => [w.nodeId, w]));
}
