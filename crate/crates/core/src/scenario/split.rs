use serde::Serialize;

use crate::{BeableObservable, Error, Result, SubsystemLayout};

/// A beable attached to the subject side, with the name it was declared under.
#[derive(Debug, Clone, PartialEq)]
pub struct SubjectBeable {
    pub name: String,
    pub beable: BeableObservable,
}

/// An object/subject partition `O/S` of the layout's labels.
///
/// Both sides are kept in layout order. The subject side may be empty,
/// which is how `(1+2+3)/∅` is written when a layout has no "rest".
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    order: Vec<String>,
    object: Vec<String>,
    subject: Vec<String>,
    subject_beable: Option<SubjectBeable>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Broaden the object.
    TowardObject,
    /// Narrow the object.
    TowardSubject,
}

/// Serializable snapshot of a split.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitView {
    pub object: Vec<String>,
    pub subject: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subject_beable: Option<String>,
    pub tag: String,
}

impl Split {
    /// `object` is given explicitly; everything else in the layout is subject.
    pub fn new(layout: &SubsystemLayout, object: &[String]) -> Result<Self> {
        layout.check_labels(object).map_err(|e| Error::Split(e.to_string()))?;
        let mut seen = std::collections::HashSet::new();
        if let Some(l) = object.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(Error::Split(format!("label `{l}` listed twice")));
        }
        if object.is_empty() {
            return Err(Error::Split("object side is empty".into()));
        }
        let order = layout.labels().to_vec();
        let split = Split {
            object: order.iter().filter(|l| object.contains(l)).cloned().collect(),
            subject: order.iter().filter(|l| !object.contains(l)).cloned().collect(),
            order,
            subject_beable: None,
        };
        debug_assert!(split.covers());
        Ok(split)
    }

    /// Checks both sides against an explicit subject list.
    pub fn with_sides(layout: &SubsystemLayout, object: &[String], subject: &[String]) -> Result<Self> {
        let split = Split::new(layout, object)?;
        let mut given: Vec<&String> = subject.iter().collect();
        given.sort();
        let mut expected: Vec<&String> = split.subject.iter().collect();
        expected.sort();
        if given != expected {
            return Err(Error::Split(format!(
                "object {:?} and subject {:?} must be disjoint and together cover {:?}",
                object,
                subject,
                layout.labels()
            )));
        }
        Ok(split)
    }

    pub fn object(&self) -> &[String] {
        &self.object
    }

    pub fn subject(&self) -> &[String] {
        &self.subject
    }

    pub fn subject_beable(&self) -> Option<&SubjectBeable> {
        self.subject_beable.as_ref()
    }

    fn covers(&self) -> bool {
        self.object.len() + self.subject.len() == self.order.len()
            && self.order.iter().all(|l| self.object.contains(l) != self.subject.contains(l))
    }

    /// Identifies the subject a claim is made relative to.
    pub fn tag(&self) -> String {
        let side = if self.subject.is_empty() { "∅".to_string() } else { self.subject.join("+") };
        match &self.subject_beable {
            Some(b) => format!("{}@{side}", b.name),
            None => format!("(no beable)@{side}"),
        }
    }

    pub fn view(&self) -> SplitView {
        SplitView {
            object: self.object.clone(),
            subject: self.subject.clone(),
            subject_beable: self.subject_beable.as_ref().map(|b| b.name.clone()),
            tag: self.tag(),
        }
    }
}

/// Result of a cut shift: the new split and, if the subject lost its
/// beable, a note saying so.
#[derive(Debug, Clone, PartialEq)]
pub struct Shifted {
    pub split: Split,
    pub note: Option<String>,
}

/// Moves `labels` across the cut. Moving the subject beable's subsystems to
/// the object side detaches the beable.
pub fn shift_cut(split: &Split, labels: &[String], direction: Direction) -> Result<Shifted> {
    let (source, side) = match direction {
        Direction::TowardObject => (&split.subject, "subject"),
        Direction::TowardSubject => (&split.object, "object"),
    };
    if let Some(l) = labels.iter().find(|l| !source.contains(l)) {
        return Err(Error::Split(format!("label `{l}` is not on the {side} side")));
    }
    let moved = |l: &String| labels.contains(l);
    let (object, subject): (Vec<String>, Vec<String>) = match direction {
        Direction::TowardObject => (
            split.order.iter().filter(|l| split.object.contains(l) || moved(l)).cloned().collect(),
            split.subject.iter().filter(|l| !moved(l)).cloned().collect(),
        ),
        Direction::TowardSubject => (
            split.object.iter().filter(|l| !moved(l)).cloned().collect(),
            split.order.iter().filter(|l| split.subject.contains(l) || moved(l)).cloned().collect(),
        ),
    };
    if object.is_empty() {
        return Err(Error::Split("shift would leave the object side empty".into()));
    }
    let mut note = None;
    let subject_beable = match &split.subject_beable {
        Some(b) if b.beable.support().iter().any(|l| !subject.contains(l)) => {
            note = Some(format!(
                "beable `{}` on {} moved to the object side and was detached from the subject",
                b.name,
                b.beable.support().join("+")
            ));
            None
        }
        other => other.clone(),
    };
    let out = Split { order: split.order.clone(), object, subject, subject_beable };
    debug_assert!(out.covers());
    Ok(Shifted { split: out, note })
}

/// Attaches `beable` to the subject, making the subject side a subject in
/// the technical sense. Replacing an existing beable must be explicit.
pub fn convert_environment_to_subject(split: &Split, name: &str, beable: &BeableObservable, replace: bool) -> Result<Split> {
    if let Some(l) = beable.support().iter().find(|l| !split.subject.contains(l)) {
        return Err(Error::Split(format!("beable `{name}` acts on `{l}`, which is not on the subject side")));
    }
    if let Some(existing) = &split.subject_beable {
        if !replace {
            return Err(Error::Split(format!(
                "subject already carries beable `{}`; set `replace` to swap it",
                existing.name
            )));
        }
    }
    Ok(Split { subject_beable: Some(SubjectBeable { name: name.to_string(), beable: beable.clone() }), ..split.clone() })
}
