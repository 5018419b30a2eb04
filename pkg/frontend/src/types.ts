export interface CatalogItem {
  question: string;
  answer: string;
  sentence_index: number;
  qg_log_prob: number;
  qa_score: number;
}

export interface CatalogResponse {
  items: CatalogItem[];
  warnings: string[];
}

export interface AnswerResponse {
  answerable: boolean;
  answer: string | null;
  score: number;
  message?: string;
}

export interface HealthResponse {
  status: string;
  model_versions: { qa: string; qg: string };
}

export interface ApiError {
  code: string;
  message: string;
}

export type AnswerResult =
  | { kind: 'answer'; answer: string; score: number }
  | { kind: 'no-answer'; message: string };

export interface UiState {
  documentText: string;
  catalog: CatalogItem[] | null;
  expanded: boolean[];
  customQuestion: string;
  customAnswer: AnswerResult | null;
  loadingCatalog: boolean;
  loadingAnswer: boolean;
  error: string | null;
}

export function initialState(): UiState {
  return {
    documentText: '',
    catalog: null,
    expanded: [],
    customQuestion: '',
    customAnswer: null,
    loadingCatalog: false,
    loadingAnswer: false,
    error: null,
  };
}
