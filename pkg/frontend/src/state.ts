/** Selection state behind the evidence-panel checkboxes.
 *
 * Mirrors the server's mask semantics exactly: an evidence item is included
 * iff its id is not excluded AND its category is not excluded. Unchecking a
 * category therefore excludes all of its evidence regardless of the
 * per-item checkboxes, which keep their own state for when the category
 * returns.
 */

import type { Evidence, SelectionMaskBody, SourceCategory } from "./api.js";

export class UiSelectionState {
  readonly excludedEvidenceIds = new Set<string>();
  readonly excludedCategories = new Set<SourceCategory>();

  setEvidenceIncluded(id: string, included: boolean): void {
    if (included) this.excludedEvidenceIds.delete(id);
    else this.excludedEvidenceIds.add(id);
  }

  setCategoryIncluded(category: SourceCategory, included: boolean): void {
    if (included) this.excludedCategories.delete(category);
    else this.excludedCategories.add(category);
  }

  evidenceChecked(id: string): boolean {
    return !this.excludedEvidenceIds.has(id);
  }

  categoryChecked(category: SourceCategory): boolean {
    return !this.excludedCategories.has(category);
  }

  /** Effective inclusion, category exclusion taken into account. */
  isIncluded(evidence: Evidence): boolean {
    return (
      !this.excludedEvidenceIds.has(evidence.id) &&
      !this.excludedCategories.has(evidence.category)
    );
  }

  toMask(): SelectionMaskBody {
    return {
      excluded_evidence_ids: [...this.excludedEvidenceIds].sort(),
      excluded_categories: [...this.excludedCategories].sort(),
    };
  }

  reset(): void {
    this.excludedEvidenceIds.clear();
    this.excludedCategories.clear();
  }
}
