import { ScoreEntry } from './types';

/**
 * Decision strip: one cell per peer, colored by decision, labeled with
 * hold-out accuracy; the base model is visually marked. Cell order follows
 * the service response order. On a network error the previous strip stays
 * with a stale-data badge.
 */
export function renderStrip(
  root: HTMLElement,
  scores: ScoreEntry[],
  baseId: string,
): void {
  root.innerHTML = '';
  root.classList.remove('stale');
  let allPositive = true;
  for (const entry of scores) {
    const cell = document.createElement('div');
    cell.className = `strip-cell ${entry.decision === 1 ? 'accept' : 'reject'}`;
    if (entry.id === baseId) {
      cell.classList.add('base');
    }
    cell.title = entry.id;
    const acc = entry.holdout_accuracy;
    cell.textContent = acc === null ? '?' : `${(100 * acc).toFixed(1)}%`;
    root.appendChild(cell);
    allPositive = allPositive && entry.decision === 1;
  }
  const notice = document.getElementById('no-recourse-notice');
  if (notice) {
    notice.hidden = !allPositive;
  }
}

export function markStripStale(root: HTMLElement): void {
  root.classList.add('stale');
  let badge = root.querySelector<HTMLElement>('.stale-badge');
  if (!badge) {
    badge = document.createElement('span');
    badge.className = 'stale-badge';
    badge.textContent = 'stale';
    root.appendChild(badge);
  }
}
