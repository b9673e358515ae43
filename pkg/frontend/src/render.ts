/**
 * DOM rendering. This layer is a thin shell over the pure modules:
 * it draws the current state and forwards user intents to the dispatcher.
 */

import {
  RelationshipEntry,
  WeaknessEntry,
  labelIndex,
  weaknessIndex,
} from "./bundle.js";
import { chainText, pathLength } from "./chains.js";
import {
  Counterpart,
  Entity,
  ExplorerState,
  isExpanded,
  relatedCounterparts,
  searchEntities,
} from "./state.js";

export interface Actions {
  select(entity: Entity): void;
  toggleExpand(entry: RelationshipEntry): void;
  setQuery(query: string): void;
  setFilter(name: string, value: string): void;
  clearFilters(): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderError(root: HTMLElement, message: string): void {
  root.replaceChildren();
  const banner = el("div", "banner error", message);
  root.append(banner);
}

export function renderEmpty(root: HTMLElement): void {
  root.replaceChildren();
  const hint = el(
    "div",
    "banner",
    "Open a .seclan-bundle.json file to start exploring, " +
      "or pass ?bundle=<url>.",
  );
  root.append(hint);
}

export function renderApp(
  root: HTMLElement,
  state: ExplorerState,
  actions: Actions,
): void {
  root.replaceChildren();
  root.append(renderSidebar(state, actions), renderMain(state, actions));
}

function renderSidebar(state: ExplorerState, actions: Actions): HTMLElement {
  const side = el("aside", "sidebar");
  const search = el("input") as HTMLInputElement;
  search.type = "search";
  search.placeholder = "Filter aspects and checks";
  search.value = state.query;
  search.addEventListener("input", () => actions.setQuery(search.value));
  side.append(search);

  const matches = searchEntities(state);
  const byDocument = new Map<string, Entity[]>();
  for (const entity of matches) {
    const list = byDocument.get(entity.document) ?? [];
    list.push(entity);
    byDocument.set(entity.document, list);
  }
  for (const doc of state.bundle.documents) {
    const list = byDocument.get(doc.name);
    if (!list) continue;
    side.append(el("h2", undefined, doc.name));
    const ul = el("ul", "entity-list");
    for (const entity of list) {
      const li = el("li");
      const button = el(
        "button",
        entity.kind === "aspect" ? "entity aspect" : "entity check",
      );
      button.append(
        el("span", "tag", entity.kind === "aspect" ? "aspect" : "check"),
        document.createTextNode(" " + entity.name),
      );
      if (
        state.selection &&
        state.selection.nodeId === entity.nodeId &&
        state.selection.kind === entity.kind
      ) {
        button.classList.add("selected");
      }
      button.addEventListener("click", () => actions.select(entity));
      li.append(button);
      ul.append(li);
    }
    side.append(ul);
  }
  if (matches.length === 0) {
    side.append(el("p", "muted", "Nothing matches the search."));
  }
  return side;
}

function renderFilterBar(state: ExplorerState, actions: Actions): HTMLElement {
  const bar = el("div", "filters");
  const dsls = state.bundle.documents.filter((d) => d.dsl).map((d) => d.name);
  const analyzers = state.bundle.documents
    .filter((d) => d.analyzer)
    .map((d) => d.name);

  const dropdown = (
    label: string,
    name: string,
    options: string[],
    current: string | null,
  ): HTMLElement => {
    const wrap = el("label", "filter", label + " ");
    const selectBox = el("select") as HTMLSelectElement;
    const anyOption = el("option", undefined, "any");
    anyOption.value = "";
    selectBox.append(anyOption);
    for (const option of options) {
      const node = el("option", undefined, option);
      node.value = option;
      if (option === current) node.selected = true;
      selectBox.append(node);
    }
    selectBox.addEventListener("change", () =>
      actions.setFilter(name, selectBox.value),
    );
    wrap.append(selectBox);
    return wrap;
  };

  bar.append(
    dropdown("DSL", "dsl", dsls, state.filters.dsl),
    dropdown("analyzer", "analyzer", analyzers, state.filters.analyzer),
    dropdown(
      "threat",
      "threat",
      state.bundle.threats.map((t) => t.name),
      state.filters.threat,
    ),
    dropdown(
      "element",
      "elementType",
      state.bundle.elementTypes.map((e) => e.name),
      state.filters.elementType,
    ),
  );

  const max = el("label", "filter", "max shortest total ");
  const maxInput = el("input") as HTMLInputElement;
  maxInput.type = "number";
  maxInput.min = "6";
  maxInput.value =
    state.filters.maxShortestTotal === null
      ? ""
      : String(state.filters.maxShortestTotal);
  maxInput.addEventListener("change", () =>
    actions.setFilter("maxShortestTotal", maxInput.value),
  );
  max.append(maxInput);
  bar.append(max);

  const clear = el("button", "clear", "clear filters");
  clear.addEventListener("click", () => actions.clearFilters());
  bar.append(clear);
  return bar;
}

function renderMain(state: ExplorerState, actions: Actions): HTMLElement {
  const main = el("main", "content");
  const docs = state.bundle.documents;
  const dslCount = docs.filter((d) => d.dsl).length;
  const analyzerCount = docs.filter((d) => d.analyzer).length;
  main.append(
    el(
      "p",
      "muted",
      `${docs.length} documents (${dslCount} DSLs, ${analyzerCount} ` +
        `analyzers), ${state.bundle.relationships.length} relationships ` +
        "in this bundle.",
    ),
  );
  if (state.selection === null) {
    main.append(
      el("p", undefined, "Select an aspect or a check on the left."),
    );
    return main;
  }

  const selection = state.selection;
  main.append(
    el(
      "h1",
      undefined,
      `${selection.document}::${selection.name}`,
    ),
    renderFilterBar(state, actions),
  );

  const counterparts = relatedCounterparts(state);
  if (counterparts.length === 0) {
    main.append(
      el(
        "p",
        "notice",
        selection.kind === "aspect"
          ? "No related checks for this aspect."
          : "No related aspects for this check.",
      ),
    );
    return main;
  }

  const labels = labelIndex(state.bundle);
  const weaknesses = weaknessIndex(state.bundle);
  for (const counterpart of counterparts) {
    main.append(
      renderCounterpart(state, counterpart, labels, weaknesses, actions),
    );
  }
  return main;
}

function renderCounterpart(
  state: ExplorerState,
  counterpart: Counterpart,
  labels: Map<string, string>,
  weaknesses: Map<string, WeaknessEntry>,
  actions: Actions,
): HTMLElement {
  const { entity, relationship } = counterpart;
  const card = el("section", "counterpart");
  const header = el("header");
  const toggle = el("button", "expand", isExpanded(state, relationship) ? "−" : "+");
  toggle.addEventListener("click", () => actions.toggleExpand(relationship));
  header.append(
    toggle,
    el("strong", undefined, `${entity.document}::${entity.name}`),
    el(
      "span",
      "muted",
      ` shortest total ${relationship.shortestTotal}` +
        ` (security ${relationship.shortestSecurity}` +
        ` + system ${relationship.shortestSystem}),` +
        ` ${relationship.securityPaths.length} security /` +
        ` ${relationship.systemPaths.length} system paths`,
    ),
  );
  card.append(header);

  if (isExpanded(state, relationship)) {
    card.append(
      renderPathPanel(
        "Security model paths",
        relationship.securityPaths,
        labels,
        weaknesses,
      ),
      renderPathPanel(
        "System model paths",
        relationship.systemPaths,
        labels,
        weaknesses,
      ),
    );
  }
  return card;
}

function renderPathPanel(
  title: string,
  paths: { nodeId: string; edgeKind: string | null; direction: "forward" | "reverse" | null }[][],
  labels: Map<string, string>,
  weaknesses: Map<string, WeaknessEntry>,
): HTMLElement {
  const panel = el("div", "paths");
  panel.append(el("h3", undefined, `${title} (${paths.length})`));
  for (const path of paths) {
    const block = el("div", "path");
    block.append(
      el("code", "chain", chainText(path, labels)),
      el("span", "muted length", ` ${pathLength(path)} edges`),
    );
    for (const step of path) {
      const weakness = weaknesses.get(step.nodeId);
      if (weakness && weakness.description) {
        const excerpt =
          weakness.description.length > 160
            ? weakness.description.slice(0, 157) + "…"
            : weakness.description;
        block.append(
          el("p", "weakness", `${weakness.id}: ${weakness.name} — ${excerpt}`),
        );
      }
    }
    panel.append(block);
  }
  return panel;
}
