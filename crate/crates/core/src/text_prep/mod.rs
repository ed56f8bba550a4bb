//! Tweet normalisation: URL and mention handling, trailing hashtags,
//! treebank-style tokenization and hashtag segmentation.

mod preprocess;
mod segment;
mod tokenize;

pub use preprocess::{preprocess, PreprocessedTweet, RawTweet, TextPrepError, URL_PATTERN};
pub use segment::{best_split, segment_hashtag, DictionaryError, SegmentationDictionary};
pub use tokenize::{is_word_token, tokenize};
