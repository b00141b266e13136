import { RecourseResponse, SchemaResponse, ScoreEntry } from './types';

export interface CardCallbacks {
  onApply: (method: string) => void;
}

/**
 * Suggestion card: per-feature "current -> required" rows for the changed
 * features, costs straight from the service, and per-peer validity badges
 * (the live transferability view). A 422 renders the honest failure with
 * the search effort spent.
 */
export function renderSuggestionCard(
  root: HTMLElement,
  method: string,
  response: RecourseResponse,
  schema: SchemaResponse,
  peerScores: ScoreEntry[] | null,
  callbacks: CardCallbacks,
): void {
  root.innerHTML = '';
  const title = document.createElement('h3');
  title.textContent = `${method} suggestion`;
  root.appendChild(title);

  const { result, costs } = response;
  if (!result.found) {
    const fail = document.createElement('p');
    fail.className = 'search-failure';
    fail.textContent =
      `no counterfactual found within budget ` +
      `(${result.evaluations_used} candidates evaluated)`;
    root.appendChild(fail);
    return;
  }

  const table = document.createElement('table');
  schema.features.forEach((spec, j) => {
    if (result.x_cf[j] === result.x[j]) {
      return;
    }
    const tr = document.createElement('tr');
    const name = document.createElement('td');
    name.textContent = spec.name;
    const move = document.createElement('td');
    move.textContent = `${result.x[j]} → ${result.x_cf[j]}`;
    tr.append(name, move);
    table.appendChild(tr);
  });
  root.appendChild(table);

  if (costs) {
    const cost = document.createElement('p');
    cost.className = 'costs';
    cost.textContent =
      `total shift ${costs.cost_total.toFixed(4)}, ` +
      `max shift ${costs.cost_max.toFixed(4)}, ` +
      `l2 ${costs.norm_cost.toFixed(4)}`;
    root.appendChild(cost);
  }

  const badges = document.createElement('div');
  badges.className = 'validity-badges';
  const entries = peerScores ?? [];
  for (const [modelId, decision] of Object.entries(result.validity)) {
    const badge = document.createElement('span');
    badge.className = `badge ${decision === 1 ? 'accept' : 'reject'}`;
    badge.textContent = modelId;
    badges.appendChild(badge);
  }
  for (const entry of entries) {
    if (!(entry.id in result.validity)) {
      const badge = document.createElement('span');
      badge.className = 'badge peer';
      badge.textContent = entry.id;
      badges.appendChild(badge);
    }
  }
  root.appendChild(badges);

  const apply = document.createElement('button');
  apply.textContent = 'apply';
  apply.addEventListener('click', () => callbacks.onApply(method));
  root.appendChild(apply);
}
