use super::{AccessKind, Assignment, MacError, Schedule};

/// Round-robin slot assignment. With more devices than slots, device `d`
/// gets slot `d mod n_slots` in frame `d / n_slots` of a repeating cycle.
pub fn tdma_schedule(n_devices: usize, n_slots: usize) -> Result<Schedule, MacError> {
    if n_devices == 0 || n_slots == 0 {
        return Err(MacError::InvalidArgument(format!(
            "need at least one device and one slot, got {n_devices} and {n_slots}"
        )));
    }
    let assignments = (0..n_devices)
        .map(|d| Assignment { device: d, index: d % n_slots, frame: d / n_slots })
        .collect();
    Ok(Schedule {
        kind: AccessKind::Tdma,
        assignments,
        frame_length: n_slots,
        cycle_length: n_devices.div_ceil(n_slots),
        frequencies: Vec::new(),
    })
}

/// Number of device pairs sharing a resource within the same frame.
pub fn collisions(schedule: &Schedule) -> usize {
    let a = &schedule.assignments;
    let mut count = 0;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if a[i].index == a[j].index && a[i].frame == a[j].frame {
                count += 1;
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_slot_each_when_enough_slots() {
        let s = tdma_schedule(3, 3).unwrap();
        let slots: Vec<_> = s.assignments.iter().map(|a| a.index).collect();
        assert_eq!(slots, vec![0, 1, 2]);
        assert_eq!(collisions(&s), 0);
        assert_eq!(s.cycle_length, 1);
        let s = tdma_schedule(1, 1).unwrap();
        assert_eq!(s.assignments[0], Assignment { device: 0, index: 0, frame: 0 });
    }

    #[test]
    fn more_devices_than_slots_cycle() {
        let s = tdma_schedule(5, 3).unwrap();
        assert_eq!(s.cycle_length, 2);
        assert_eq!(collisions(&s), 0);
        let served: Vec<usize> = (0..s.cycle_length).flat_map(|f| s.served_in(f)).map(|a| a.device).collect();
        let mut sorted = served.clone();
        sorted.sort();
        assert_eq!(sorted, vec![0, 1, 2, 3, 4]);
        assert_eq!(s.served_in(2), s.served_in(0));
    }

    #[test]
    fn zero_inputs_rejected() {
        assert!(tdma_schedule(0, 3).is_err());
        assert!(tdma_schedule(2, 0).is_err());
    }
}
