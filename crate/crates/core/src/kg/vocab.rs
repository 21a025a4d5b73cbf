use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Dense entity identifier, assigned in first-seen order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EntityId(pub u32);

/// Dense relation identifier, assigned in first-seen order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RelationId(pub u32);

impl EntityId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl RelationId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e#{}", self.0)
    }
}

impl fmt::Display for RelationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r#{}", self.0)
    }
}

/// Bijective string interner with dense ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Interner {
    names: Vec<Box<str>>,
    ids: HashMap<Box<str>, u32>,
}

impl Interner {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = u32::try_from(self.names.len()).expect("interner overflow");
        let boxed: Box<str> = name.into();
        self.names.push(boxed.clone());
        self.ids.insert(boxed, id);
        id
    }

    pub fn get(&self, name: &str) -> Option<u32> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, id: u32) -> Option<&str> {
        self.names.get(id as usize).map(|s| &**s)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &str)> {
        self.names.iter().enumerate().map(|(i, s)| (i as u32, &**s))
    }
}

/// Entity and relation name tables of a graph.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    entities: Interner,
    relations: Interner,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern_entity(&mut self, name: &str) -> EntityId {
        EntityId(self.entities.intern(name))
    }

    pub fn intern_relation(&mut self, name: &str) -> RelationId {
        RelationId(self.relations.intern(name))
    }

    pub fn entity_id(&self, name: &str) -> Option<EntityId> {
        self.entities.get(name).map(EntityId)
    }

    pub fn relation_id(&self, name: &str) -> Option<RelationId> {
        self.relations.get(name).map(RelationId)
    }

    pub fn entity_name(&self, id: EntityId) -> Option<&str> {
        self.entities.name(id.0)
    }

    pub fn relation_name(&self, id: RelationId) -> Option<&str> {
        self.relations.name(id.0)
    }

    pub fn num_entities(&self) -> usize {
        self.entities.len()
    }

    pub fn num_relations(&self) -> usize {
        self.relations.len()
    }

    pub fn entities(&self) -> &Interner {
        &self.entities
    }

    pub fn relations(&self) -> &Interner {
        &self.relations
    }

    pub fn relation_ids(&self) -> impl Iterator<Item = RelationId> {
        (0..self.relations.len() as u32).map(RelationId)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ids_follow_first_seen_order() {
        let mut v = Vocabulary::new();
        assert_eq!(v.intern_entity("Alice"), EntityId(0));
        assert_eq!(v.intern_entity("Bob"), EntityId(1));
        assert_eq!(v.intern_entity("Alice"), EntityId(0));
        assert_eq!(v.intern_relation("marry_to"), RelationId(0));
        assert_eq!(v.num_entities(), 2);
        assert_eq!(v.num_relations(), 1);
        assert_eq!(v.entity_name(EntityId(1)), Some("Bob"));
        assert_eq!(v.entity_name(EntityId(2)), None);
    }

    proptest! {
        #[test]
        fn interning_is_a_dense_bijection(names in proptest::collection::vec("[a-z]{1,6}", 0..64)) {
            let mut interner = Interner::new();
            let ids: Vec<u32> = names.iter().map(|n| interner.intern(n)).collect();
            for (name, id) in names.iter().zip(&ids) {
                prop_assert_eq!(interner.name(*id), Some(name.as_str()));
            }
            let distinct: std::collections::HashSet<&String> = names.iter().collect();
            prop_assert_eq!(interner.len(), distinct.len());
            if let Some(max) = ids.iter().max() {
                prop_assert_eq!(*max as usize + 1, interner.len());
            }
        }
    }
}
