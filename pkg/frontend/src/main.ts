/** Entry point: bundle loading, state updates, re-rendering. */

import { Bundle, ParseFailure, SchemaMismatch, parseBundle } from "./bundle.js";
import {
  Entity,
  ExplorerState,
  clearFilters,
  createState,
  select,
  setFilters,
  setQuery,
  toggleExpanded,
} from "./state.js";
import { renderApp, renderEmpty, renderError } from "./render.js";

const root = document.getElementById("app") as HTMLElement;
let state: ExplorerState | null = null;

function rerender(): void {
  if (state === null) {
    renderEmpty(root);
    return;
  }
  renderApp(root, state, {
    select(entity: Entity) {
      state = select(state!, entity);
      rerender();
    },
    toggleExpand(entry) {
      state = toggleExpanded(state!, entry);
      rerender();
    },
    setQuery(query: string) {
      state = setQuery(state!, query);
      rerender();
    },
    setFilter(name: string, value: string) {
      const cleared = value === "" ? null : value;
      if (name === "maxShortestTotal") {
        state = setFilters(state!, {
          maxShortestTotal: cleared === null ? null : Number(cleared),
        });
      } else {
        state = setFilters(state!, { [name]: cleared });
      }
      rerender();
    },
    clearFilters() {
      state = clearFilters(state!);
      rerender();
    },
  });
}

function loadText(text: string, source: string): void {
  let decoded: unknown;
  try {
    decoded = JSON.parse(text);
  } catch (error) {
    renderError(root, `${source}: not valid JSON (${String(error)})`);
    return;
  }
  let bundle: Bundle;
  try {
    bundle = parseBundle(decoded);
  } catch (error) {
    if (error instanceof SchemaMismatch || error instanceof ParseFailure) {
      renderError(root, `${source}: ${error.message}`);
      return;
    }
    throw error;
  }
  state = createState(bundle);
  rerender();
}

const picker = document.getElementById("bundle-file") as HTMLInputElement;
picker.addEventListener("change", () => {
  const file = picker.files?.[0];
  if (!file) return;
  file.text().then((text) => loadText(text, file.name));
});

const params = new URLSearchParams(window.location.search);
const bundleUrl = params.get("bundle");
if (bundleUrl) {
  fetch(bundleUrl)
    .then((response) => {
      if (!response.ok) throw new Error(`HTTP ${response.status}`);
      return response.text();
    })
    .then((text) => loadText(text, bundleUrl))
    .catch((error) => renderError(root, `${bundleUrl}: ${String(error)}`));
} else {
  rerender();
}
