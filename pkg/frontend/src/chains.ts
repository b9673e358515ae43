/**
 * Chain-text rendering of bundle paths.
 *
 * Uses the same format as the CLI and the generated site:
 * `A -[kind]-> B` for an edge traversed in its direction and
 * `A <-[kind]- B` against it, so rendered chains can be compared
 * byte-for-byte with other renderings of the same bundle.
 */

import type { PathStep } from "./bundle.js";

export function chainText(
  path: PathStep[],
  labels: Map<string, string>,
): string {
  const label = (nodeId: string): string => labels.get(nodeId) ?? nodeId;
  const parts: string[] = [label(path[0].nodeId)];
  for (let i = 0; i + 1 < path.length; i += 1) {
    const step = path[i];
    const connector =
      step.direction === "forward"
        ? ` -[${step.edgeKind}]-> `
        : ` <-[${step.edgeKind}]- `;
    parts.push(connector, label(path[i + 1].nodeId));
  }
  return parts.join("");
}

/** Edge count of a path (steps minus the terminal node entry). */
export function pathLength(path: PathStep[]): number {
  return path.length - 1;
}
